#pragma once
// Shared DSP machinery: FFT (FFTW-backed), zero-phase Gaussian low-pass,
// band-limited rate conversion, fractional-delay interpolation, seeded
// portable Gaussian noise, small statistics helpers.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "pamsim/waveform.hpp"

namespace pamsim::dsp {

// ---------------------------------------------------------------------------
// FFT. In-place complex transform; inverse scales by 1/N. Plans are cached
// per size with deterministic (FFTW_ESTIMATE) algorithm selection, so results
// are identical run to run; execution is thread-safe.
void fft(std::vector<std::complex<double>>& data, bool inverse);

// ---------------------------------------------------------------------------
// Zero-phase Gaussian low-pass: |H(f)| = exp(-ln2/2 * (f/f3db)^(2*order)),
// applied by cyclic frequency-domain multiplication. H(0)=1, |H(f3db)|=-3dB.
// f3db in GHz against the waveform's rate in GSa/s. Throws on f3db <= 0.
void gaussian_lowpass(DigitalWaveform& wf, double f3db_ghz, int order = 1);
void gaussian_lowpass(OpticalField& field, double f3db_ghz, int order = 1);

// ---------------------------------------------------------------------------
// Band-limited arbitrary-ratio rate conversion (windowed-sinc polyphase,
// Kaiser beta=10, 32 taps per phase at the output grid, per-phase unity DC
// gain). Cuts at the smaller of the two Nyquist frequencies, so decimation is
// anti-aliased. Output length = floor(n_in * out_rate / in_rate).
DigitalWaveform resample(const DigitalWaveform& wf, double out_rate_gsa);

// Band-limited point interpolation at positions t0 + k*step (in input-sample
// units), without anti-aliasing: the continuous signal reconstructed from the
// input grid is evaluated as-is. Positions outside the input are treated as
// zero signal.
std::vector<double> interp_at(const std::vector<double>& x, double t0, double step,
                              std::size_t n_out);

// ---------------------------------------------------------------------------
// Power spectrum |X(f)|^2 of a real waveform (no window); bin k maps to
// frequency k*rate/n for k < n/2.
std::vector<double> power_spectrum(const DigitalWaveform& wf);

// ---------------------------------------------------------------------------
// Deterministic portable randomness. std::mt19937_64 output is pinned by the
// standard; the mappings below avoid the implementation-defined distribution
// adapters.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Marsaglia polar method; returns one N(0,1) draw per call.
class GaussianDraw {
  public:
    explicit GaussianDraw(std::uint64_t seed) : rng_(seed) {}
    double operator()();
    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// splitmix64; used to derive independent sub-seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Small helpers.
double mean(const std::vector<double>& v);
double rms(const std::vector<double>& v);
double mean_power_mw(const OpticalField& f); // mean |E|^2

inline double db10(double x) { return 10.0 * std::log10(x); }
inline double undb10(double d) { return std::pow(10.0, d / 10.0); }
inline double db20(double x) { return 20.0 * std::log10(x); }

// Best rational approximation p/q to x with q <= max_den (continued
// fractions). Used to recover exact resampling ratios from rate quotients.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};
Rational rational_approx(double x, std::int64_t max_den);

} // namespace pamsim::dsp
