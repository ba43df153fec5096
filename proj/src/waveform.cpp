#include "pamsim/waveform.hpp"

#include <cstring>
#include <fstream>

#include "pamsim/errors.hpp"

namespace pamsim {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Host doubles are written as-is; all supported targets are little-endian
// IEEE-754, documented in the README.
void write_header(std::ostream& os, const char magic[4], std::uint32_t count, double rate) {
    os.write(magic, 4);
    put_u32(os, count);
    os.write(reinterpret_cast<const char*>(&rate), 8);
}

void write_sidecar(const std::string& path, const Metadata& meta) {
    if (meta.empty()) return;
    std::ofstream os(path + ".meta");
    for (const auto& [k, v] : meta) os << k << "=" << v << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    return is;
}

} // namespace

void write_waveform(const std::string& path, const DigitalWaveform& wf, const Metadata& meta) {
    auto os = open_out(path);
    write_header(os, "PSW1", static_cast<std::uint32_t>(wf.samples.size()), wf.rate_gsa);
    os.write(reinterpret_cast<const char*>(wf.samples.data()),
             static_cast<std::streamsize>(wf.samples.size() * sizeof(double)));
    write_sidecar(path, meta);
}

DigitalWaveform read_waveform(const std::string& path) {
    auto is = open_in(path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "PSW1", 4) != 0) throw ConfigError("bad magic in " + path);
    const std::uint32_t n = get_u32(is);
    DigitalWaveform wf;
    is.read(reinterpret_cast<char*>(&wf.rate_gsa), 8);
    wf.samples.resize(n);
    is.read(reinterpret_cast<char*>(wf.samples.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw ConfigError("truncated waveform file: " + path);
    return wf;
}

void write_field(const std::string& path, const OpticalField& f, const Metadata& meta) {
    auto os = open_out(path);
    write_header(os, "PSC1", static_cast<std::uint32_t>(f.samples.size()), f.rate_gsa);
    os.write(reinterpret_cast<const char*>(f.samples.data()),
             static_cast<std::streamsize>(f.samples.size() * sizeof(std::complex<double>)));
    write_sidecar(path, meta);
}

OpticalField read_field(const std::string& path) {
    auto is = open_in(path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "PSC1", 4) != 0) throw ConfigError("bad magic in " + path);
    const std::uint32_t n = get_u32(is);
    OpticalField f;
    is.read(reinterpret_cast<char*>(&f.rate_gsa), 8);
    f.samples.resize(n);
    is.read(reinterpret_cast<char*>(f.samples.data()),
            static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    if (!is) throw ConfigError("truncated field file: " + path);
    return f;
}

void write_vector(const std::string& path, const std::vector<double>& v, const Metadata& meta) {
    DigitalWaveform wf;
    wf.samples = v;
    wf.rate_gsa = 0.0;
    write_waveform(path, wf, meta);
}

} // namespace pamsim
