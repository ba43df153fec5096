#include "pamsim/txchain.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"
#include "pamsim/kernels.hpp"

namespace pamsim::txchain {

namespace {

// Feedback tap sets (1-indexed stages) of standard maximal-length
// polynomials, one per supported degree.
const std::map<int, std::vector<int>>& prbs_taps() {
    static const std::map<int, std::vector<int>> taps = {
        {7, {7, 6}},  {9, {9, 5}},   {11, {11, 9}}, {13, {13, 4, 3, 1}},
        {15, {15, 14}}, {23, {23, 18}}, {31, {31, 28}},
    };
    return taps;
}

} // namespace

std::vector<std::uint8_t> prbs_generate(int degree, std::uint32_t seed, std::size_t n) {
    const auto& all = prbs_taps();
    const auto it = all.find(degree);
    if (it == all.end()) throw ConfigError("prbs_generate: unsupported degree");
    const std::uint32_t mask = (degree == 31) ? 0x7fffffffu : ((1u << degree) - 1u);
    std::uint32_t state = seed & mask;
    if (state == 0) throw ConfigError("prbs_generate: seed must be nonzero in the low bits");

    std::uint32_t tapmask = 0;
    for (int t : it->second) tapmask |= 1u << (t - 1);

    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<std::uint8_t>(state & 1u);
        const std::uint32_t fb = static_cast<std::uint32_t>(__builtin_popcount(state & tapmask) & 1);
        state = (state >> 1) | (fb << (degree - 1));
    }
    return out;
}

namespace {

// Continuous-time RRC pulse in symbol-time units, peak-normalized to h(0)=1.
double rrc_continuous(double t, double alpha) {
    t = std::abs(t);
    const double peak = 1.0 - alpha + 4.0 * alpha / M_PI;
    if (t < 1e-9) return 1.0;
    if (alpha > 0.0 && std::abs(t - 1.0 / (4.0 * alpha)) < 1e-9) {
        const double arg = M_PI / (4.0 * alpha);
        const double v = (alpha / std::sqrt(2.0)) *
                         ((1.0 + 2.0 / M_PI) * std::sin(arg) + (1.0 - 2.0 / M_PI) * std::cos(arg));
        return v / peak;
    }
    const double four_at = 4.0 * alpha * t;
    const double num = std::sin(M_PI * t * (1.0 - alpha)) + four_at * std::cos(M_PI * t * (1.0 + alpha));
    const double den = M_PI * t * (1.0 - four_at * four_at);
    return (num / den) / peak;
}

} // namespace

std::vector<double> rrc_taps(double alpha, int sps, int span) {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("rrc_taps: rolloff outside [0, 1]");
    if (sps < 2) throw ConfigError("rrc_taps: need at least 2 samples/symbol");
    if (span < 2 || span % 2 != 0) throw ConfigError("rrc_taps: span must be even and >= 2");

    const int n = span * sps + 1;
    const int center = span * sps / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        h[static_cast<std::size_t>(k)] =
            rrc_continuous(static_cast<double>(k - center) / sps, alpha);

    const double energy = kernels::dot(h.data(), h.data(), h.size());
    const double g = 1.0 / std::sqrt(energy);
    for (auto& v : h) v *= g;
    return h;
}

DigitalWaveform shape_and_resample(const std::vector<double>& symbols,
                                   const PulseShaperConfig& shaper, double dac_rate_gsa) {
    if (shaper.rolloff < 0.0 || shaper.rolloff > 1.0)
        throw ConfigError("shape_and_resample: rolloff outside [0, 1]");
    if (shaper.span < 2 || shaper.span % 2 != 0)
        throw ConfigError("shape_and_resample: span must be even and >= 2");
    if (shaper.symbol_rate_gbd <= 0.0 || dac_rate_gsa <= 0.0)
        throw ConfigError("shape_and_resample: rates must be positive");
    const double occupied = shaper.symbol_rate_gbd * (1.0 + shaper.rolloff) / 2.0;
    if (occupied > dac_rate_gsa / 2.0 + 1e-9)
        throw ConfigError("shape_and_resample: occupied bandwidth exceeds DAC Nyquist");
    if (symbols.empty()) return {{}, dac_rate_gsa};

    // Output positions in symbol time: t_m = m * Rs/dac. With a rational rate
    // quotient the fractional parts cycle, so the pulse tap rows are cached
    // per phase.
    const double step = shaper.symbol_rate_gbd / dac_rate_gsa; // symbols per output sample
    const dsp::Rational r = dsp::rational_approx(step, 1 << 16);
    const bool exact =
        std::abs(step - static_cast<double>(r.num) / static_cast<double>(r.den)) < 1e-12 * step;

    const auto n_sym = static_cast<std::int64_t>(symbols.size());
    const std::int64_t n_out =
        exact ? (n_sym * r.den) / r.num
              : static_cast<std::int64_t>(std::floor(static_cast<double>(n_sym) / step));
    const int half = shaper.span / 2;

    DigitalWaveform out;
    out.rate_gsa = dac_rate_gsa;
    out.samples.resize(static_cast<std::size_t>(n_out));

    std::vector<std::vector<double>> rows(exact ? static_cast<std::size_t>(r.den) : 0);
    std::vector<double> row_buf;
    std::vector<double> window(static_cast<std::size_t>(2 * half));

    for (std::int64_t m = 0; m < n_out; ++m) {
        double phi;        // fractional symbol offset
        std::int64_t k0;   // integer symbol index at/below the position
        const std::vector<double>* row;
        if (exact) {
            const std::int64_t pos_num = m * r.num; // position = pos_num / den symbols
            k0 = pos_num / r.den;
            const auto j = static_cast<std::size_t>(pos_num % r.den);
            phi = static_cast<double>(pos_num % r.den) / static_cast<double>(r.den);
            auto& cached = rows[j];
            if (cached.empty()) {
                cached.resize(static_cast<std::size_t>(2 * half));
                for (int o = -half + 1; o <= half; ++o)
                    cached[static_cast<std::size_t>(o + half - 1)] =
                        rrc_continuous(phi - static_cast<double>(o), shaper.rolloff);
            }
            row = &cached;
        } else {
            const double t = static_cast<double>(m) * step;
            k0 = static_cast<std::int64_t>(std::floor(t));
            phi = t - std::floor(t);
            row_buf.resize(static_cast<std::size_t>(2 * half));
            for (int o = -half + 1; o <= half; ++o)
                row_buf[static_cast<std::size_t>(o + half - 1)] =
                    rrc_continuous(phi - static_cast<double>(o), shaper.rolloff);
            row = &row_buf;
        }

        // Symbols k0-half+1 .. k0+half contribute; indices wrap cyclically.
        const std::int64_t first = k0 - half + 1;
        if (first >= 0 && k0 + half < n_sym) {
            out.samples[static_cast<std::size_t>(m)] =
                kernels::dot(row->data(), symbols.data() + first, static_cast<std::size_t>(2 * half));
        } else {
            for (int o = 0; o < 2 * half; ++o) {
                std::int64_t k = (first + o) % n_sym;
                if (k < 0) k += n_sym;
                window[static_cast<std::size_t>(o)] = symbols[static_cast<std::size_t>(k)];
            }
            out.samples[static_cast<std::size_t>(m)] =
                kernels::dot(row->data(), window.data(), static_cast<std::size_t>(2 * half));
        }
    }
    return out;
}

DigitalWaveform dac_quantize(const DigitalWaveform& wf, int bits, double vpp, ClipMode mode,
                             double backoff_db) {
    if (bits < 4 || bits > 12) throw ConfigError("dac_quantize: bits outside [4, 12]");
    if (vpp <= 0.0) throw ConfigError("dac_quantize: vpp must be positive");

    const double half_scale = vpp / 2.0;
    double scale = 1.0;
    if (mode == ClipMode::peak) {
        double peak = 0.0;
        for (double x : wf.samples) peak = std::max(peak, std::abs(x));
        scale = (peak > 0.0) ? half_scale / peak : 0.0;
    } else {
        const double r = dsp::rms(wf.samples);
        scale = (r > 0.0) ? half_scale * std::pow(10.0, -backoff_db / 20.0) / r : 0.0;
    }

    const double lsb = vpp / std::pow(2.0, bits);
    const double qmax = std::pow(2.0, bits - 1) - 1.0;
    const double qmin = -std::pow(2.0, bits - 1);

    DigitalWaveform out;
    out.rate_gsa = wf.rate_gsa;
    out.samples.resize(wf.samples.size());
    for (std::size_t i = 0; i < wf.samples.size(); ++i) {
        double v = wf.samples[i] * scale;
        v = std::clamp(v, -half_scale, half_scale); // hard clip (rms_backoff may exceed range)
        const double q = std::clamp(std::round(v / lsb), qmin, qmax);
        out.samples[i] = q * lsb;
    }
    return out;
}

} // namespace pamsim::txchain
