#pragma once
// Configuration-driven experiment runner: rate planning, single simulation
// points, ROP sweeps with a deterministic worker pool, diagnostic exports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pamsim/channel.hpp"
#include "pamsim/metrics.hpp"
#include "pamsim/rxdsp.hpp"
#include "pamsim/shaping.hpp"
#include "pamsim/txchain.hpp"

namespace pamsim::runner {

enum class Modulation { pam4, pam6, pam8 };
enum class ShapingMode { uniform, cap, cup };

struct DacConfig {
    double rate_gsa = 120.0;
    int bits = 8;
    double vpp = 0.3;
    txchain::ClipMode clip_mode = txchain::ClipMode::peak;
    double rms_backoff_db = 9.0;
};

struct RunConfig {
    int schema_version = 1;
    Modulation modulation = Modulation::pam8;
    ShapingMode shaping = ShapingMode::uniform;
    double symbol_rate_gbd = 90.0;
    double net_rate_gbps = 200.0;
    double fec_overhead = 0.07;
    double entropy_override = 0.0; // 0 = derive from the rate plan
    double rolloff = -1.0;         // < 0 = per-rate rule (0.4 / 0.33 / 0.12)
    int rrc_span = 64;
    std::uint64_t n_symbols = 65536;
    int sync_symbols = 4096;
    int prbs_degree = 23;
    std::uint64_t master_seed = 1;
    bool bypass_channel = false; // digital back-to-back (txchain straight to rxdsp)
    DacConfig dac;
    channel::ChannelConfig channel;
    rxdsp::EqualizerConfig equalizer;
    rxdsp::DecisionRule decision_rule = rxdsp::DecisionRule::nearest;
    std::vector<double> rop_sweep_dbm;
    int seeds_per_point = 1;
    std::string output_dir = "out";
};

// Strict JSON round trip: unknown keys are rejected, serialization is
// canonical (fixed key order), parse(serialize(parse(x))) == parse(x).
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

// Derived quantities.
double effective_rolloff(const RunConfig& cfg);
double effective_entropy(const RunConfig& cfg); // target H in bits/symbol
double mapping_bits(Modulation m);              // 2 / 2.5 / 3
int modulation_order(Modulation m);
shaping::ShapedDistribution make_distribution(const RunConfig& cfg);
std::vector<int> make_symbols(const RunConfig& cfg, std::uint64_t seed);
std::string descriptor(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Rate planning

struct PlanRow {
    double symbol_rate_gbd = 0.0;
    double entropy = 0.0;
    double ps_overhead = 0.0;
    double net_rate_gbps = 0.0;
    double nu_cap = 0.0;
    double nu_cup = 0.0;
    std::string note; // e.g. off-target arithmetic flag
};

std::vector<PlanRow> plan_rows(const RunConfig& cfg, const std::vector<double>& symbol_rates);
std::string plan_table_text(const std::vector<PlanRow>& rows);

// ---------------------------------------------------------------------------
// Simulation

struct SimArtifacts {
    DigitalWaveform rx_capture;     // at the ADC rate
    std::vector<double> equalized;  // payload region
    std::vector<double> weights;
    double sync_delay = 0.0;
    std::vector<int> tx_indices;
    std::vector<int> decided;
};

// One deterministic end-to-end run; identical (cfg, rop, seed) give identical
// results. rop is ignored when cfg.bypass_channel is set.
metrics::BerPoint simulate_point(const RunConfig& cfg, double rop_dbm, std::uint64_t seed,
                                 SimArtifacts* artifacts = nullptr);

struct SweepResult {
    metrics::BerCurve curve;
    std::optional<metrics::SensitivityResult> sens; // empty only on ambiguity errors
    std::string sens_error;
    std::string csv;
    std::string json;
};

// Runs all (rop, seed) points on a bounded worker pool (PAMSIM_WORKERS env
// var, default hardware concurrency); per-point seeds derive from
// (master_seed, point index) so parallelism never changes results.
SweepResult run_sweep(const RunConfig& cfg, int workers = 0);

// Test hook: the same aggregation/serialization path fed with ready points.
SweepResult sweep_from_points(const RunConfig& cfg, const std::vector<metrics::BerPoint>& points);

// Writes csv+json into cfg.output_dir (created if missing); returns the paths.
std::vector<std::string> write_sweep_outputs(const RunConfig& cfg, const SweepResult& res);

int worker_count_from_env();

} // namespace pamsim::runner
