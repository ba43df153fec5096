#pragma once
// Receive DSP: symbol-aided synchronization, resampling to 1 sample/symbol,
// Volterra nonlinear equalization (MMSE-trained, DD-LMS-tracked), symbol
// decision and demapping with BER counting.

#include <cstdint>
#include <functional>
#include <vector>

#include "pamsim/shaping.hpp"
#include "pamsim/waveform.hpp"

namespace pamsim::rxdsp {

// ---------------------------------------------------------------------------
// Synchronization

// Cross-correlates rx against a pulse-shaped reference waveform (same rate)
// and returns the delay in samples, with parabolic sub-sample refinement of
// the correlation peak. Polarity-agnostic (the chain inverts the signal).
// Throws SyncFailure when the peak-to-secondary ratio is below 1.5.
// sps_estimate sets the main-lobe exclusion window of the ratio test.
double synchronize(const DigitalWaveform& rx, const DigitalWaveform& reference,
                   double sps_estimate);

// Band-limited interpolation at instants delay + k*rate/symbol_rate,
// k = 0..n_symbols-1. Deliberately applies no anti-alias filter: T-spaced
// sampling folds the excess band, which is the intended receiver behavior.
std::vector<double> resample_1sps(const DigitalWaveform& rx, double delay_samples,
                                  double symbol_rate_gbd, std::size_t n_symbols);

// ---------------------------------------------------------------------------
// Volterra equalizer

struct EqualizerConfig {
    int mem1 = 311; // linear memory (odd)
    int mem2 = 11;  // 2nd-order kernel memory (odd, centered in the linear window)
    int mem3 = 11;  // 3rd-order kernel memory (odd, centered)
    bool order1 = true;
    bool order2 = true;
    bool order3 = true;
    double ridge = 1e-6;     // times trace/n on the normal equations
    double mu_ddlms = 1e-4;
    int train_symbols = 8192;
};

// mem1 + mem2(mem2+1)/2 + mem3(mem3+1)(mem3+2)/6 over the enabled orders.
std::size_t feature_count(const EqualizerConfig& cfg);

// Feature vector for the symbol at index k of sequence x (zero-padded at the
// edges). Ordering: linear taps ascending, then unordered pairs (i<=j) in
// lexicographic index order, then unordered triples (i<=j<=k).
void fill_features(const EqualizerConfig& cfg, const double* x, std::int64_t n, std::int64_t k,
                   double* f);

// Convenience form taking a centered window of mem1 samples.
std::vector<double> volterra_features(const std::vector<double>& window,
                                      const EqualizerConfig& cfg);

// Least-squares weights over the first targets.size() symbols of x:
// argmin sum (d - w.f)^2 + lambda ||w||^2, lambda = ridge * trace(G)/n,
// solved by Cholesky on the normal equations. Throws NumericalError on an
// indefinite system (advising a positive ridge).
std::vector<double> mmse_train(const std::vector<double>& x, const std::vector<double>& targets,
                               const EqualizerConfig& cfg);

struct EqualizerState {
    std::vector<double> weights;
    std::size_t symbol_index = 0;
    enum class Mode { train, dd } mode = Mode::dd;
};

// One DD-LMS step: y = w.f, e = decide(y) - y, w += mu*e*f. Returns y (before
// the update). The divergence guard throws when ||w|| exceeds 1e6.
double ddlms_step(EqualizerState& state, const double* f, std::size_t nf,
                  const std::function<double(double)>& decide_level, double mu);

// ---------------------------------------------------------------------------
// Decision and demapping

enum class DecisionRule { nearest, map };

// nearest: closest level, ties toward the lower level. map: argmax
// p(level) * exp(-(y-level)^2 / (2*noise_var)).
int decide_index(double y, const shaping::ShapedDistribution& dist, DecisionRule rule,
                 double noise_var = 1.0);

struct BerCount {
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    double ber = 0.0;
};

// Compares decided vs transmitted level indices through the format's bit
// mapping (Gray for PAM-4/8 and shaped runs, the pair code for PAM-6).
BerCount demap_and_count(const std::vector<int>& decided, const std::vector<int>& transmitted,
                         int order);
// Same, against the original bit stream.
BerCount demap_and_count_bits(const std::vector<int>& decided,
                              const std::vector<std::uint8_t>& tx_bits, int order);

// ---------------------------------------------------------------------------
// Full receiver equalization pass

struct EqualizeResult {
    std::vector<double> equalized; // one output per symbol
    std::vector<int> decided;      // level indices
    EqualizerState state;
    double train_mse = 0.0;        // residual after training (post gain trim)
    double noise_var = 0.0;        // training residual variance (for the map rule)
};

// MMSE training on the first cfg.train_symbols (known targets), decision-gain
// renormalization, then DD-LMS over the remainder.
EqualizeResult run_equalizer(const std::vector<double>& x, const std::vector<double>& targets,
                             const shaping::ShapedDistribution& dist, const EqualizerConfig& cfg,
                             DecisionRule rule);

} // namespace pamsim::rxdsp
