#include "pamsim/rxdsp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"
#include "pamsim/kernels.hpp"

namespace pamsim::rxdsp {

// ---------------------------------------------------------------------------
// Synchronization

double synchronize(const DigitalWaveform& rx, const DigitalWaveform& reference,
                   double sps_estimate) {
    const std::size_t n_rx = rx.samples.size();
    const std::size_t n_ref = reference.samples.size();
    if (n_ref == 0 || n_rx < 4 * n_ref)
        throw ConfigError("synchronize: rx must be at least 4x the reference length");

    // Linear cross-correlation c[d] = sum_i ref[i] * rx[i+d] via FFT.
    std::size_t len = 1;
    while (len < n_rx + n_ref) len <<= 1;
    std::vector<std::complex<double>> a(len), b(len);
    const double rx_mean = dsp::mean(rx.samples);
    const double ref_mean = dsp::mean(reference.samples);
    for (std::size_t i = 0; i < n_rx; ++i) a[i] = rx.samples[i] - rx_mean;
    for (std::size_t i = 0; i < n_ref; ++i) b[i] = reference.samples[i] - ref_mean;
    dsp::fft(a, false);
    dsp::fft(b, false);
    for (std::size_t i = 0; i < len; ++i) a[i] *= std::conj(b[i]);
    dsp::fft(a, true);

    const std::size_t n_lag = n_rx - n_ref + 1;
    std::vector<double> mag(n_lag);
    for (std::size_t d = 0; d < n_lag; ++d) mag[d] = std::abs(a[d]);

    std::size_t d0 = 0;
    for (std::size_t d = 1; d < n_lag; ++d)
        if (mag[d] > mag[d0]) d0 = d;

    const auto exclusion = static_cast<std::size_t>(std::ceil(2.0 * std::max(1.0, sps_estimate)));
    double second = 0.0;
    for (std::size_t d = 0; d < n_lag; ++d) {
        const std::size_t dist = (d > d0) ? d - d0 : d0 - d;
        if (dist > exclusion) second = std::max(second, mag[d]);
    }
    if (second > 0.0 && mag[d0] / second < 1.5)
        throw SyncFailure("no dominant correlation peak (ratio < 1.5)");

    double frac = 0.0;
    if (d0 > 0 && d0 + 1 < n_lag) {
        const double ym = mag[d0 - 1], y0 = mag[d0], yp = mag[d0 + 1];
        const double den = ym - 2.0 * y0 + yp;
        if (std::abs(den) > 1e-30) frac = 0.5 * (ym - yp) / den;
    }
    return static_cast<double>(d0) + frac;
}

std::vector<double> resample_1sps(const DigitalWaveform& rx, double delay_samples,
                                  double symbol_rate_gbd, std::size_t n_symbols) {
    if (symbol_rate_gbd <= 0.0) throw ConfigError("resample_1sps: symbol rate must be positive");
    const double step = rx.rate_gsa / symbol_rate_gbd;
    const double last = delay_samples + static_cast<double>(n_symbols - 1) * step;
    if (n_symbols > 0 && last >= static_cast<double>(rx.samples.size()))
        throw ConfigError("resample_1sps: not enough samples for the requested symbol count");
    return dsp::interp_at(rx.samples, delay_samples, step, n_symbols);
}

// ---------------------------------------------------------------------------
// Volterra features

namespace {

void validate(const EqualizerConfig& cfg) {
    if (cfg.mem1 <= 0 || cfg.mem1 % 2 == 0 || (cfg.order2 && (cfg.mem2 <= 0 || cfg.mem2 % 2 == 0)) ||
        (cfg.order3 && (cfg.mem3 <= 0 || cfg.mem3 % 2 == 0)))
        throw ConfigError("equalizer memories must be odd and positive");
    if ((cfg.order2 && cfg.mem2 > cfg.mem1) || (cfg.order3 && cfg.mem3 > cfg.mem1))
        throw ConfigError("kernel memories must fit inside the linear window");
    if (!cfg.order1 && !cfg.order2 && !cfg.order3)
        throw ConfigError("at least one Volterra order must be enabled");
}

} // namespace

std::size_t feature_count(const EqualizerConfig& cfg) {
    validate(cfg);
    std::size_t n = 0;
    const auto m1 = static_cast<std::size_t>(cfg.mem1);
    const auto m2 = static_cast<std::size_t>(cfg.mem2);
    const auto m3 = static_cast<std::size_t>(cfg.mem3);
    if (cfg.order1) n += m1;
    if (cfg.order2) n += m2 * (m2 + 1) / 2;
    if (cfg.order3) n += m3 * (m3 + 1) * (m3 + 2) / 6;
    return n;
}

void fill_features(const EqualizerConfig& cfg, const double* x, std::int64_t n, std::int64_t k,
                   double* f) {
    const int h1 = cfg.mem1 / 2;
    // Centered linear window with zero padding outside the sequence.
    double* w = f; // when order1 is enabled the window IS the linear block
    std::vector<double> tmp;
    if (!cfg.order1) {
        tmp.resize(static_cast<std::size_t>(cfg.mem1));
        w = tmp.data();
    }
    for (int o = -h1; o <= h1; ++o) {
        const std::int64_t idx = k + o;
        w[o + h1] = (idx >= 0 && idx < n) ? x[idx] : 0.0;
    }
    double* out = f + (cfg.order1 ? cfg.mem1 : 0);

    if (cfg.order2) {
        const int h2 = cfg.mem2 / 2;
        const double* c = w + h1 - h2;
        for (int i = 0; i < cfg.mem2; ++i) {
            const double xi = c[i];
            for (int j = i; j < cfg.mem2; ++j) *out++ = xi * c[j];
        }
    }
    if (cfg.order3) {
        const int h3 = cfg.mem3 / 2;
        const double* c = w + h1 - h3;
        for (int i = 0; i < cfg.mem3; ++i) {
            const double xi = c[i];
            for (int j = i; j < cfg.mem3; ++j) {
                const double xij = xi * c[j];
                for (int l = j; l < cfg.mem3; ++l) *out++ = xij * c[l];
            }
        }
    }
}

std::vector<double> volterra_features(const std::vector<double>& window,
                                      const EqualizerConfig& cfg) {
    if (window.size() != static_cast<std::size_t>(cfg.mem1))
        throw ConfigError("volterra_features: window must hold mem1 samples");
    std::vector<double> f(feature_count(cfg));
    fill_features(cfg, window.data(), static_cast<std::int64_t>(window.size()), cfg.mem1 / 2,
                  f.data());
    return f;
}

// ---------------------------------------------------------------------------
// MMSE training

std::vector<double> mmse_train(const std::vector<double>& x, const std::vector<double>& targets,
                               const EqualizerConfig& cfg) {
    const std::size_t nf = feature_count(cfg);
    const std::size_t nt = targets.size();
    if (nt == 0 || nt > x.size()) throw ConfigError("mmse_train: bad training length");
    if (nt < nf)
        throw ConfigError("mmse_train: fewer training symbols than features");

    std::vector<double> gram(nf * nf, 0.0); // row-major, upper triangle accumulated
    std::vector<double> rhs(nf, 0.0);
    std::vector<double> f(nf);
    for (std::size_t k = 0; k < nt; ++k) {
        fill_features(cfg, x.data(), static_cast<std::int64_t>(x.size()),
                      static_cast<std::int64_t>(k), f.data());
        for (std::size_t i = 0; i < nf; ++i)
            kernels::axpy(f[i], f.data() + i, gram.data() + i * nf + i, nf - i);
        kernels::axpy(targets[k], f.data(), rhs.data(), nf);
    }
    // Mirror and regularize: lambda = ridge * trace/n.
    double trace = 0.0;
    for (std::size_t i = 0; i < nf; ++i) trace += gram[i * nf + i];
    const double lambda = cfg.ridge * trace / static_cast<double>(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        gram[i * nf + i] += lambda;
        for (std::size_t j = i + 1; j < nf; ++j) gram[j * nf + i] = gram[i * nf + j];
    }

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMajor> G(gram.data(), static_cast<Eigen::Index>(nf),
                           static_cast<Eigen::Index>(nf));
    Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(nf));
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
        throw NumericalError("mmse_train: normal equations not positive definite; use ridge > 0");
    Eigen::VectorXd w = llt.solve(b);
    return {w.data(), w.data() + nf};
}

// ---------------------------------------------------------------------------
// DD-LMS

double ddlms_step(EqualizerState& state, const double* f, std::size_t nf,
                  const std::function<double(double)>& decide_level, double mu) {
    if (state.weights.size() != nf) throw ConfigError("ddlms_step: weight/feature size mismatch");
    const double y = kernels::dot(state.weights.data(), f, nf);
    if (!std::isfinite(y)) throw NumericalError("ddlms_step: equalizer diverged");
    const double e = decide_level(y) - y;
    kernels::axpy(mu * e, f, state.weights.data(), nf);
    state.symbol_index++;
    if ((state.symbol_index & 0xff) == 0) {
        const double wn = kernels::dot(state.weights.data(), state.weights.data(), nf);
        if (wn > 1e12) throw NumericalError("ddlms_step: equalizer diverged (||w|| > 1e6)");
    }
    return y;
}

// ---------------------------------------------------------------------------
// Decision

int decide_index(double y, const shaping::ShapedDistribution& dist, DecisionRule rule,
                 double noise_var) {
    const auto& levels = dist.constellation.levels;
    const int m = static_cast<int>(levels.size());
    if (rule == DecisionRule::nearest) {
        for (int i = 0; i + 1 < m; ++i)
            if (y <= 0.5 * (levels[i] + levels[i + 1])) return i;
        return m - 1;
    }
    // MAP with the shaped priors; ties resolve to the lower level, which
    // makes uniform priors agree with the nearest rule everywhere.
    int best = 0;
    double best_metric = -1e300;
    for (int i = 0; i < m; ++i) {
        const double d = y - levels[i];
        const double metric = std::log(std::max(dist.probs[static_cast<std::size_t>(i)], 1e-300)) -
                              d * d / (2.0 * noise_var);
        if (metric > best_metric) {
            best_metric = metric;
            best = i;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Demapping

namespace {

int popcount32(std::uint32_t v) { return __builtin_popcount(v); }

} // namespace

BerCount demap_and_count(const std::vector<int>& decided, const std::vector<int>& transmitted,
                         int order) {
    if (decided.size() != transmitted.size())
        throw ConfigError("demap_and_count: sequence length mismatch");
    BerCount c;
    if (order == 6) {
        const auto rx_bits = shaping::pam6_decode(decided);
        const auto tx_bits = shaping::pam6_decode(transmitted);
        c.bits = rx_bits.size();
        for (std::size_t i = 0; i < rx_bits.size(); ++i) c.errors += rx_bits[i] != tx_bits[i];
    } else {
        const int b = (order == 4) ? 2 : 3;
        c.bits = decided.size() * static_cast<std::size_t>(b);
        for (std::size_t i = 0; i < decided.size(); ++i)
            c.errors += static_cast<std::uint64_t>(
                popcount32(shaping::gray_label(decided[i]) ^ shaping::gray_label(transmitted[i])));
    }
    c.ber = c.bits ? static_cast<double>(c.errors) / static_cast<double>(c.bits) : 0.0;
    return c;
}

BerCount demap_and_count_bits(const std::vector<int>& decided,
                              const std::vector<std::uint8_t>& tx_bits, int order) {
    const auto rx_bits =
        (order == 6) ? shaping::pam6_decode(decided) : shaping::gray_demap(decided, order);
    if (rx_bits.size() != tx_bits.size())
        throw ConfigError("demap_and_count_bits: bit length mismatch");
    BerCount c;
    c.bits = rx_bits.size();
    for (std::size_t i = 0; i < rx_bits.size(); ++i) c.errors += rx_bits[i] != tx_bits[i];
    c.ber = c.bits ? static_cast<double>(c.errors) / static_cast<double>(c.bits) : 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// Full pass

EqualizeResult run_equalizer(const std::vector<double>& x, const std::vector<double>& targets,
                             const shaping::ShapedDistribution& dist, const EqualizerConfig& cfg,
                             DecisionRule rule) {
    const std::size_t nf = feature_count(cfg);
    const auto n = x.size();
    const auto nt = std::min<std::size_t>(targets.size(), static_cast<std::size_t>(cfg.train_symbols));
    if (nt < nf) throw ConfigError("run_equalizer: training shorter than the feature count");

    EqualizeResult res;
    res.state.weights =
        mmse_train(x, {targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(nt)}, cfg);
    res.state.mode = EqualizerState::Mode::train;

    // Decision-gain trim: scale weights so the training output is unbiased
    // against the level grid.
    std::vector<double> f(nf);
    double dy = 0.0, yy = 0.0;
    std::vector<double> ytrain(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        fill_features(cfg, x.data(), static_cast<std::int64_t>(n), static_cast<std::int64_t>(k),
                      f.data());
        const double y = kernels::dot(res.state.weights.data(), f.data(), nf);
        ytrain[k] = y;
        dy += targets[k] * y;
        yy += y * y;
    }
    if (yy > 0.0 && dy > 0.0) {
        const double g = dy / yy;
        for (auto& w : res.state.weights) w *= g;
        for (auto& y : ytrain) y *= g;
    }
    double mse = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
        const double e = targets[k] - ytrain[k];
        mse += e * e;
    }
    res.train_mse = mse / static_cast<double>(nt);
    res.noise_var = std::max(res.train_mse, 1e-12);

    res.equalized.resize(n);
    res.decided.resize(n);
    for (std::size_t k = 0; k < nt; ++k) {
        res.equalized[k] = ytrain[k];
        res.decided[k] = decide_index(ytrain[k], dist, rule, res.noise_var);
    }

    res.state.mode = EqualizerState::Mode::dd;
    res.state.symbol_index = nt;
    const auto& levels = dist.constellation.levels;
    for (std::size_t k = nt; k < n; ++k) {
        fill_features(cfg, x.data(), static_cast<std::int64_t>(n), static_cast<std::int64_t>(k),
                      f.data());
        const double y = kernels::dot(res.state.weights.data(), f.data(), nf);
        if (!std::isfinite(y)) throw NumericalError("run_equalizer: equalizer diverged");
        const int idx = decide_index(y, dist, rule, res.noise_var);
        const double e = levels[static_cast<std::size_t>(idx)] - y;
        kernels::axpy(cfg.mu_ddlms * e, f.data(), res.state.weights.data(), nf);
        res.equalized[k] = y;
        res.decided[k] = idx;
        if ((k & 0x3ff) == 0) {
            const double wn =
                kernels::dot(res.state.weights.data(), res.state.weights.data(), nf);
            if (wn > 1e12) throw NumericalError("run_equalizer: equalizer diverged (||w|| > 1e6)");
        }
        res.state.symbol_index = k + 1;
    }
    return res;
}

} // namespace pamsim::rxdsp
