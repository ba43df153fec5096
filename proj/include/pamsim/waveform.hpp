#pragma once
// Sampled-signal containers and their binary dump format.
//
// Dump layout (little-endian): 16-byte header = 4-byte magic ("PSW1" real,
// "PSC1" complex), uint32 element count, float64 sample rate in GSa/s;
// followed by the samples as float64 (complex stored re,im interleaved).
// A plain-text sidecar "<path>.meta" carries key=value metadata lines.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pamsim {

struct DigitalWaveform {
    std::vector<double> samples;
    double rate_gsa = 0.0; // GSa/s

    std::size_t size() const { return samples.size(); }
};

struct OpticalField {
    std::vector<std::complex<double>> samples; // baseband field, sqrt(mW)
    double rate_gsa = 0.0;

    std::size_t size() const { return samples.size(); }
};

using Metadata = std::map<std::string, std::string>;

void write_waveform(const std::string& path, const DigitalWaveform& wf, const Metadata& meta = {});
DigitalWaveform read_waveform(const std::string& path);

void write_field(const std::string& path, const OpticalField& f, const Metadata& meta = {});
OpticalField read_field(const std::string& path);

// Weight vectors and other non-time-series data reuse the real format with
// rate_gsa = 0.
void write_vector(const std::string& path, const std::vector<double>& v, const Metadata& meta = {});

} // namespace pamsim
