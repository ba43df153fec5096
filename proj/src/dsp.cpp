#include "pamsim/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "pamsim/errors.hpp"
#include "pamsim/kernels.hpp"

namespace pamsim::dsp {

// ---------------------------------------------------------------------------
// FFT

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is. Plans are
// cached per (size, direction) and created with FFTW_ESTIMATE so the chosen
// algorithm depends only on the size, never on timing.
fftw_plan get_plan(std::size_t n, int sign) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> tmp(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

} // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) return;
    fftw_plan p = get_plan(data.size(), inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
    if (inverse) {
        const double s = 1.0 / static_cast<double>(data.size());
        for (auto& v : data) v *= s;
    }
}

// ---------------------------------------------------------------------------
// Gaussian low-pass

namespace {

void apply_gaussian(std::vector<std::complex<double>>& spec, double rate_gsa, double f3db,
                    int order) {
    const std::size_t n = spec.size();
    const double df = rate_gsa / static_cast<double>(n);
    const double ln2_half = 0.5 * std::log(2.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k <= n / 2) ? df * static_cast<double>(k)
                                      : df * (static_cast<double>(k) - static_cast<double>(n));
        const double r = f / f3db;
        spec[k] *= std::exp(-ln2_half * std::pow(r * r, order));
    }
}

} // namespace

void gaussian_lowpass(DigitalWaveform& wf, double f3db_ghz, int order) {
    if (f3db_ghz <= 0.0) throw ConfigError("gaussian_lowpass: f3db must be positive");
    if (wf.samples.empty()) return;
    std::vector<std::complex<double>> spec(wf.samples.begin(), wf.samples.end());
    fft(spec, false);
    apply_gaussian(spec, wf.rate_gsa, f3db_ghz, order);
    fft(spec, true);
    for (std::size_t i = 0; i < wf.samples.size(); ++i) wf.samples[i] = spec[i].real();
}

void gaussian_lowpass(OpticalField& field, double f3db_ghz, int order) {
    if (f3db_ghz <= 0.0) throw ConfigError("gaussian_lowpass: f3db must be positive");
    if (field.samples.empty()) return;
    fft(field.samples, false);
    apply_gaussian(field.samples, field.rate_gsa, f3db_ghz, order);
    fft(field.samples, true);
}

// ---------------------------------------------------------------------------
// Windowed-sinc interpolation core

namespace {

constexpr double kKaiserBeta = 10.0;
constexpr int kTapsPerSide = 16;

double kaiser(double u_norm, double i0_beta) {
    const double t = 1.0 - u_norm * u_norm;
    if (t <= 0.0) return 0.0;
    return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(t)) / i0_beta;
}

double sinc_pi(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(M_PI * x) / (M_PI * x);
}

// Taps covering input offsets o in [-half+1, half] around floor(t) for a
// position with fractional part phi. Rows are normalized to unit sum so a
// constant input passes through exactly.
std::vector<double> tap_row(double phi, double cutoff, int half, double i0_beta) {
    std::vector<double> taps(static_cast<std::size_t>(2 * half));
    double sum = 0.0;
    for (int m = 0; m < 2 * half; ++m) {
        const double u = (static_cast<double>(m - half + 1) - phi); // offset from position
        const double h = cutoff * sinc_pi(cutoff * u) * kaiser(u / static_cast<double>(half), i0_beta);
        taps[static_cast<std::size_t>(m)] = h;
        sum += h;
    }
    for (auto& t : taps) t /= sum;
    return taps;
}

// Dot product of a tap row against input samples, clipping the window to the
// valid range (outside samples count as zero).
double apply_taps(const std::vector<double>& x, std::int64_t n0, const std::vector<double>& taps,
                  int half) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    std::int64_t i0 = n0 - half + 1;
    std::int64_t lo = std::max<std::int64_t>(i0, 0);
    std::int64_t hi = std::min<std::int64_t>(i0 + static_cast<std::int64_t>(taps.size()), n);
    if (lo >= hi) return 0.0;
    return kernels::dot(taps.data() + (lo - i0), x.data() + lo, static_cast<std::size_t>(hi - lo));
}

} // namespace

Rational rational_approx(double x, std::int64_t max_den) {
    // Continued-fraction expansion; stops at max_den or machine precision.
    Rational best{static_cast<std::int64_t>(std::llround(x)), 1};
    double rem = x;
    std::int64_t p0 = 1, q0 = 0; // previous-previous convergent
    std::int64_t p1 = static_cast<std::int64_t>(std::floor(x)), q1 = 1;
    rem = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12 * std::max(1.0, std::abs(x)))
            break;
        if (rem < 1e-15) break;
        rem = 1.0 / rem;
        const auto a = static_cast<std::int64_t>(std::floor(rem));
        rem -= std::floor(rem);
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    best.num = p1;
    best.den = q1;
    return best;
}

DigitalWaveform resample(const DigitalWaveform& wf, double out_rate_gsa) {
    if (wf.rate_gsa <= 0.0 || out_rate_gsa <= 0.0)
        throw ConfigError("resample: rates must be positive");
    if (wf.rate_gsa == out_rate_gsa) return wf;

    const double step = wf.rate_gsa / out_rate_gsa; // input samples per output sample
    const double ratio = out_rate_gsa / wf.rate_gsa;
    const double cutoff = std::min(1.0, ratio);
    const int half = static_cast<int>(std::ceil(kTapsPerSide / cutoff));
    const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);

    const Rational r = rational_approx(step, 1 << 16); // step ~= num/den
    const bool exact = std::abs(step - static_cast<double>(r.num) / static_cast<double>(r.den)) <
                       1e-12 * step;

    const auto n_in = static_cast<std::int64_t>(wf.samples.size());
    std::int64_t n_out;
    if (exact)
        n_out = (n_in * r.den) / r.num;
    else
        n_out = static_cast<std::int64_t>(std::floor(static_cast<double>(n_in) / step));

    DigitalWaveform out;
    out.rate_gsa = out_rate_gsa;
    out.samples.resize(static_cast<std::size_t>(n_out));

    if (exact && r.den <= 8192) {
        // Phase-cached path: fractional positions cycle with period den.
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(r.den));
        for (std::int64_t k = 0; k < n_out; ++k) {
            const std::int64_t pos_num = k * r.num; // position = pos_num / den
            const std::int64_t n0 = pos_num / r.den;
            const std::int64_t j = pos_num % r.den;
            auto& row = rows[static_cast<std::size_t>(j)];
            if (row.empty())
                row = tap_row(static_cast<double>(j) / static_cast<double>(r.den), cutoff, half,
                              i0_beta);
            out.samples[static_cast<std::size_t>(k)] = apply_taps(wf.samples, n0, row, half);
        }
    } else {
        for (std::int64_t k = 0; k < n_out; ++k) {
            const double t = static_cast<double>(k) * step;
            const double n0d = std::floor(t);
            const auto row = tap_row(t - n0d, cutoff, half, i0_beta);
            out.samples[static_cast<std::size_t>(k)] =
                apply_taps(wf.samples, static_cast<std::int64_t>(n0d), row, half);
        }
    }
    return out;
}

std::vector<double> interp_at(const std::vector<double>& x, double t0, double step,
                              std::size_t n_out) {
    const int half = kTapsPerSide;
    const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);
    std::vector<double> out(n_out);

    const Rational r = rational_approx(step, 1 << 16);
    const bool exact =
        step > 0.0 &&
        std::abs(step - static_cast<double>(r.num) / static_cast<double>(r.den)) < 1e-12 * step &&
        r.den <= 8192;

    if (exact) {
        // t_k = t0 + k*num/den: fractional parts take at most den distinct
        // values offset by frac(t0).
        const double t0_frac = t0 - std::floor(t0);
        const auto t0_int = static_cast<std::int64_t>(std::floor(t0));
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(r.den));
        for (std::size_t k = 0; k < n_out; ++k) {
            const std::int64_t pos_num = static_cast<std::int64_t>(k) * r.num;
            std::int64_t n0 = t0_int + pos_num / r.den;
            double phi = t0_frac + static_cast<double>(pos_num % r.den) / static_cast<double>(r.den);
            std::size_t j = static_cast<std::size_t>(pos_num % r.den);
            if (phi >= 1.0) {
                phi -= 1.0;
                n0 += 1;
            }
            auto& row = rows[j];
            if (row.empty()) row = tap_row(phi, 1.0, half, i0_beta);
            out[k] = apply_taps(x, n0, row, half);
        }
    } else {
        for (std::size_t k = 0; k < n_out; ++k) {
            const double t = t0 + static_cast<double>(k) * step;
            const double n0d = std::floor(t);
            const auto row = tap_row(t - n0d, 1.0, half, i0_beta);
            out[k] = apply_taps(x, static_cast<std::int64_t>(n0d), row, half);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> power_spectrum(const DigitalWaveform& wf) {
    std::vector<std::complex<double>> spec(wf.samples.begin(), wf.samples.end());
    fft(spec, false);
    std::vector<double> p(spec.size());
    kernels::magsq(spec.data(), p.data(), spec.size());
    return p;
}

double GaussianDraw::operator()() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01(rng_) - 1.0;
        v = 2.0 * uniform01(rng_) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double rms(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = kernels::dot(v.data(), v.data(), v.size());
    return std::sqrt(s / static_cast<double>(v.size()));
}

double mean_power_mw(const OpticalField& f) {
    if (f.samples.empty()) return 0.0;
    std::vector<double> p(f.samples.size());
    kernels::magsq(f.samples.data(), p.data(), f.samples.size());
    return mean(p);
}

} // namespace pamsim::dsp
