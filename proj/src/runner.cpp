#include "pamsim/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"

namespace pamsim::runner {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Enum names

namespace {

const char* to_name(Modulation m) {
    switch (m) {
        case Modulation::pam4: return "pam4";
        case Modulation::pam6: return "pam6";
        case Modulation::pam8: return "pam8";
    }
    return "pam8";
}

const char* to_name(ShapingMode s) {
    switch (s) {
        case ShapingMode::uniform: return "uniform";
        case ShapingMode::cap: return "cap";
        case ShapingMode::cup: return "cup";
    }
    return "uniform";
}

Modulation modulation_from(const std::string& s) {
    if (s == "pam4") return Modulation::pam4;
    if (s == "pam6") return Modulation::pam6;
    if (s == "pam8") return Modulation::pam8;
    throw ConfigError("unknown modulation: " + s);
}

ShapingMode shaping_from(const std::string& s) {
    if (s == "uniform") return ShapingMode::uniform;
    if (s == "cap") return ShapingMode::cap;
    if (s == "cup") return ShapingMode::cup;
    throw ConfigError("unknown shaping: " + s);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

} // namespace

// ---------------------------------------------------------------------------
// Config JSON

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("JSON parse failure: ") + e.what());
    }
    check_keys(j,
               {"schema_version", "modulation", "shaping", "symbol_rate_gbd", "net_rate_gbps",
                "fec_overhead", "entropy_override", "rolloff", "rrc_span", "n_symbols",
                "sync_symbols", "prbs_degree", "master_seed", "bypass_channel", "dac", "channel",
                "equalizer", "decision_rule", "rop_sweep_dbm", "seeds_per_point", "output_dir"},
               "config root");

    RunConfig c;
    read_if(j, "schema_version", c.schema_version);
    if (c.schema_version != 1) throw ConfigError("unsupported schema_version");
    if (j.contains("modulation")) c.modulation = modulation_from(j.at("modulation"));
    if (j.contains("shaping")) c.shaping = shaping_from(j.at("shaping"));
    read_if(j, "symbol_rate_gbd", c.symbol_rate_gbd);
    read_if(j, "net_rate_gbps", c.net_rate_gbps);
    read_if(j, "fec_overhead", c.fec_overhead);
    read_if(j, "entropy_override", c.entropy_override);
    read_if(j, "rolloff", c.rolloff);
    read_if(j, "rrc_span", c.rrc_span);
    read_if(j, "n_symbols", c.n_symbols);
    read_if(j, "sync_symbols", c.sync_symbols);
    read_if(j, "prbs_degree", c.prbs_degree);
    read_if(j, "master_seed", c.master_seed);
    read_if(j, "bypass_channel", c.bypass_channel);

    if (j.contains("dac")) {
        const json& d = j.at("dac");
        check_keys(d, {"rate_gsa", "bits", "vpp", "clip_mode", "rms_backoff_db"}, "dac");
        read_if(d, "rate_gsa", c.dac.rate_gsa);
        read_if(d, "bits", c.dac.bits);
        read_if(d, "vpp", c.dac.vpp);
        if (d.contains("clip_mode")) {
            const std::string m = d.at("clip_mode");
            if (m == "peak")
                c.dac.clip_mode = txchain::ClipMode::peak;
            else if (m == "rms_backoff")
                c.dac.clip_mode = txchain::ClipMode::rms_backoff;
            else
                throw ConfigError("unknown clip_mode: " + m);
        }
        read_if(d, "rms_backoff_db", c.dac.rms_backoff_db);
    }

    if (j.contains("channel")) {
        const json& h = j.at("channel");
        check_keys(h,
                   {"sim_rate_gsa", "awg_bw_ghz", "ea_bw_ghz", "ea_gain_db", "ea_sat_v",
                    "mzm_bw_ghz", "v_pi", "laser_power_mw", "fiber_km", "atten_db_per_km",
                    "amp_out_dbm", "amp_nf_db", "wavelength_nm", "opt_filter_bw_ghz", "pd_bw_ghz",
                    "pd_resp_a_w", "thermal_psd_a2_hz", "adc_rate_gsa", "adc_bw_ghz", "adc_bits",
                    "filter_order"},
                   "channel");
        auto& ch = c.channel;
        read_if(h, "sim_rate_gsa", ch.sim_rate_gsa);
        read_if(h, "awg_bw_ghz", ch.awg_bw_ghz);
        read_if(h, "ea_bw_ghz", ch.ea_bw_ghz);
        read_if(h, "ea_gain_db", ch.ea_gain_db);
        read_if(h, "ea_sat_v", ch.ea_sat_v);
        read_if(h, "mzm_bw_ghz", ch.mzm_bw_ghz);
        read_if(h, "v_pi", ch.v_pi);
        read_if(h, "laser_power_mw", ch.laser_power_mw);
        read_if(h, "fiber_km", ch.fiber_km);
        read_if(h, "atten_db_per_km", ch.atten_db_per_km);
        read_if(h, "amp_out_dbm", ch.amp_out_dbm);
        read_if(h, "amp_nf_db", ch.amp_nf_db);
        read_if(h, "wavelength_nm", ch.wavelength_nm);
        read_if(h, "opt_filter_bw_ghz", ch.opt_filter_bw_ghz);
        read_if(h, "pd_bw_ghz", ch.pd_bw_ghz);
        read_if(h, "pd_resp_a_w", ch.pd_resp_a_w);
        read_if(h, "thermal_psd_a2_hz", ch.thermal_psd_a2_hz);
        read_if(h, "adc_rate_gsa", ch.adc_rate_gsa);
        read_if(h, "adc_bw_ghz", ch.adc_bw_ghz);
        read_if(h, "adc_bits", ch.adc_bits);
        read_if(h, "filter_order", ch.filter_order);
    }

    if (j.contains("equalizer")) {
        const json& e = j.at("equalizer");
        check_keys(e, {"mem1", "mem2", "mem3", "orders", "ridge", "mu_ddlms", "train_symbols"},
                   "equalizer");
        auto& q = c.equalizer;
        read_if(e, "mem1", q.mem1);
        read_if(e, "mem2", q.mem2);
        read_if(e, "mem3", q.mem3);
        if (e.contains("orders")) {
            q.order1 = q.order2 = q.order3 = false;
            for (int o : e.at("orders").get<std::vector<int>>()) {
                if (o == 1)
                    q.order1 = true;
                else if (o == 2)
                    q.order2 = true;
                else if (o == 3)
                    q.order3 = true;
                else
                    throw ConfigError("equalizer orders must be within {1,2,3}");
            }
        }
        read_if(e, "ridge", q.ridge);
        read_if(e, "mu_ddlms", q.mu_ddlms);
        read_if(e, "train_symbols", q.train_symbols);
    }

    if (j.contains("decision_rule")) {
        const std::string r = j.at("decision_rule");
        if (r == "nearest")
            c.decision_rule = rxdsp::DecisionRule::nearest;
        else if (r == "map")
            c.decision_rule = rxdsp::DecisionRule::map;
        else
            throw ConfigError("unknown decision_rule: " + r);
    }
    read_if(j, "rop_sweep_dbm", c.rop_sweep_dbm);
    read_if(j, "seeds_per_point", c.seeds_per_point);
    read_if(j, "output_dir", c.output_dir);
    return c;
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["modulation"] = to_name(c.modulation);
    j["shaping"] = to_name(c.shaping);
    j["symbol_rate_gbd"] = c.symbol_rate_gbd;
    j["net_rate_gbps"] = c.net_rate_gbps;
    j["fec_overhead"] = c.fec_overhead;
    j["entropy_override"] = c.entropy_override;
    j["rolloff"] = c.rolloff;
    j["rrc_span"] = c.rrc_span;
    j["n_symbols"] = c.n_symbols;
    j["sync_symbols"] = c.sync_symbols;
    j["prbs_degree"] = c.prbs_degree;
    j["master_seed"] = c.master_seed;
    j["bypass_channel"] = c.bypass_channel;
    j["dac"] = {{"rate_gsa", c.dac.rate_gsa},
                {"bits", c.dac.bits},
                {"vpp", c.dac.vpp},
                {"clip_mode", c.dac.clip_mode == txchain::ClipMode::peak ? "peak" : "rms_backoff"},
                {"rms_backoff_db", c.dac.rms_backoff_db}};
    const auto& ch = c.channel;
    j["channel"] = {{"sim_rate_gsa", ch.sim_rate_gsa},
                    {"awg_bw_ghz", ch.awg_bw_ghz},
                    {"ea_bw_ghz", ch.ea_bw_ghz},
                    {"ea_gain_db", ch.ea_gain_db},
                    {"ea_sat_v", ch.ea_sat_v},
                    {"mzm_bw_ghz", ch.mzm_bw_ghz},
                    {"v_pi", ch.v_pi},
                    {"laser_power_mw", ch.laser_power_mw},
                    {"fiber_km", ch.fiber_km},
                    {"atten_db_per_km", ch.atten_db_per_km},
                    {"amp_out_dbm", ch.amp_out_dbm},
                    {"amp_nf_db", ch.amp_nf_db},
                    {"wavelength_nm", ch.wavelength_nm},
                    {"opt_filter_bw_ghz", ch.opt_filter_bw_ghz},
                    {"pd_bw_ghz", ch.pd_bw_ghz},
                    {"pd_resp_a_w", ch.pd_resp_a_w},
                    {"thermal_psd_a2_hz", ch.thermal_psd_a2_hz},
                    {"adc_rate_gsa", ch.adc_rate_gsa},
                    {"adc_bw_ghz", ch.adc_bw_ghz},
                    {"adc_bits", ch.adc_bits},
                    {"filter_order", ch.filter_order}};
    std::vector<int> orders;
    if (c.equalizer.order1) orders.push_back(1);
    if (c.equalizer.order2) orders.push_back(2);
    if (c.equalizer.order3) orders.push_back(3);
    j["equalizer"] = {{"mem1", c.equalizer.mem1},     {"mem2", c.equalizer.mem2},
                      {"mem3", c.equalizer.mem3},     {"orders", orders},
                      {"ridge", c.equalizer.ridge},   {"mu_ddlms", c.equalizer.mu_ddlms},
                      {"train_symbols", c.equalizer.train_symbols}};
    j["decision_rule"] = c.decision_rule == rxdsp::DecisionRule::nearest ? "nearest" : "map";
    j["rop_sweep_dbm"] = c.rop_sweep_dbm;
    j["seeds_per_point"] = c.seeds_per_point;
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Derived quantities

int modulation_order(Modulation m) {
    switch (m) {
        case Modulation::pam4: return 4;
        case Modulation::pam6: return 6;
        case Modulation::pam8: return 8;
    }
    return 8;
}

double mapping_bits(Modulation m) {
    switch (m) {
        case Modulation::pam4: return 2.0;
        case Modulation::pam6: return 2.5; // 5 bits on 2 symbols
        case Modulation::pam8: return 3.0;
    }
    return 3.0;
}

double effective_rolloff(const RunConfig& cfg) {
    if (cfg.rolloff >= 0.0) return cfg.rolloff;
    // Per-rate rule: 0.4 below 90 GBd, 0.33 at 90..100, 0.12 above.
    if (cfg.symbol_rate_gbd < 90.0) return 0.4;
    if (cfg.symbol_rate_gbd < 100.0) return 0.33;
    return 0.12;
}

namespace {

void validate(const RunConfig& cfg) {
    if (cfg.shaping != ShapingMode::uniform && cfg.modulation != Modulation::pam8)
        throw ConfigError("probabilistic shaping requires pam8");
    if (cfg.modulation == Modulation::pam6 && cfg.n_symbols % 2 != 0)
        throw ConfigError("pam6 needs an even symbol count");
    if (cfg.n_symbols == 0) throw ConfigError("n_symbols must be positive");
    if (cfg.seeds_per_point < 1) throw ConfigError("seeds_per_point must be >= 1");
}

} // namespace

double effective_entropy(const RunConfig& cfg) {
    const double m = mapping_bits(cfg.modulation);
    if (cfg.shaping == ShapingMode::uniform) return m;
    if (cfg.entropy_override > 0.0) return cfg.entropy_override;
    return shaping::required_entropy(cfg.net_rate_gbps, cfg.symbol_rate_gbd, cfg.fec_overhead, m);
}

shaping::ShapedDistribution make_distribution(const RunConfig& cfg) {
    validate(cfg);
    const auto c = shaping::PamConstellation::pam(modulation_order(cfg.modulation));
    if (cfg.shaping == ShapingMode::uniform) return shaping::mb_distribution(c, 0.0, shaping::Polarity::cap);
    const auto pol =
        cfg.shaping == ShapingMode::cap ? shaping::Polarity::cap : shaping::Polarity::cup;
    const double nu = shaping::solve_nu(c, pol, effective_entropy(cfg));
    return shaping::mb_distribution(c, nu, pol);
}

std::vector<int> make_symbols(const RunConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    const int order = modulation_order(cfg.modulation);
    if (cfg.shaping != ShapingMode::uniform) {
        const auto dist = make_distribution(cfg);
        return shaping::sample_symbols(dist, cfg.n_symbols, dsp::mix_seed(seed, 0x736d706cULL));
    }
    auto prbs_seed = static_cast<std::uint32_t>(dsp::mix_seed(seed, 0x70726273ULL));
    prbs_seed |= 1u; // nonzero in the LFSR state
    std::size_t n_bits;
    if (order == 6)
        n_bits = cfg.n_symbols / 2 * 5;
    else
        n_bits = cfg.n_symbols * static_cast<std::size_t>(order == 4 ? 2 : 3);
    const auto bits = txchain::prbs_generate(cfg.prbs_degree, prbs_seed, n_bits);
    return (order == 6) ? shaping::pam6_encode(bits) : shaping::gray_map(bits, order);
}

std::string descriptor(const RunConfig& cfg) {
    char buf[96];
    if (cfg.shaping == ShapingMode::uniform)
        std::snprintf(buf, sizeof(buf), "%s-uniform-%gGBd", to_name(cfg.modulation),
                      cfg.symbol_rate_gbd);
    else
        std::snprintf(buf, sizeof(buf), "%s-%s-%gGBd-H%.4f", to_name(cfg.modulation),
                      to_name(cfg.shaping), cfg.symbol_rate_gbd, effective_entropy(cfg));
    return buf;
}

// ---------------------------------------------------------------------------
// Planning

std::vector<PlanRow> plan_rows(const RunConfig& cfg, const std::vector<double>& symbol_rates) {
    const double m = mapping_bits(cfg.modulation);
    const auto c8 = shaping::PamConstellation::pam(8);
    std::vector<PlanRow> rows;
    for (double rs : symbol_rates) {
        PlanRow r;
        r.symbol_rate_gbd = rs;
        try {
            if (cfg.shaping == ShapingMode::uniform) {
                r.entropy = m;
                r.ps_overhead = 0.0;
                r.net_rate_gbps = shaping::achievable_net_rate(m, rs, cfg.fec_overhead, m);
            } else {
                const auto plan =
                    shaping::make_rate_plan(cfg.net_rate_gbps, rs, cfg.fec_overhead, m);
                r.entropy = plan.entropy_target;
                r.ps_overhead = plan.ps_overhead;
                r.net_rate_gbps = plan.net_rate_gbps;
                r.nu_cap = shaping::solve_nu(c8, shaping::Polarity::cap, r.entropy);
                r.nu_cup = shaping::solve_nu(c8, shaping::Polarity::cup, r.entropy);
            }
            if (std::abs(r.net_rate_gbps - cfg.net_rate_gbps) > 0.05) {
                char note[96];
                std::snprintf(note, sizeof(note), "net rate off target by %+.2f Gbit/s",
                              r.net_rate_gbps - cfg.net_rate_gbps);
                r.note = note;
            }
        } catch (const Error& e) {
            r.note = e.what();
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string plan_table_text(const std::vector<PlanRow>& rows) {
    std::string s =
        "symbol_rate_gbd  entropy   ps_overhead  net_rate_gbps  nu_cap      nu_cup      note\n";
    char line[224];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%-16.6g %-9.6g %-12.6g %-14.6f %-11.6g %-11.6g %s\n",
                      r.symbol_rate_gbd, r.entropy, r.ps_overhead, r.net_rate_gbps, r.nu_cap,
                      r.nu_cup, r.note.c_str());
        s += line;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Simulation

metrics::BerPoint simulate_point(const RunConfig& cfg, double rop_dbm, std::uint64_t seed,
                                 SimArtifacts* artifacts) {
    validate(cfg);
    const int order = modulation_order(cfg.modulation);
    const auto dist = make_distribution(cfg);
    const auto indices = make_symbols(cfg, seed);
    std::vector<double> levels(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
        levels[i] = dist.constellation.levels[static_cast<std::size_t>(indices[i])];

    txchain::PulseShaperConfig shaper;
    shaper.rolloff = effective_rolloff(cfg);
    shaper.span = cfg.rrc_span;
    shaper.symbol_rate_gbd = cfg.symbol_rate_gbd;

    const auto analog = txchain::shape_and_resample(levels, shaper, cfg.dac.rate_gsa);
    const auto dac_out = txchain::dac_quantize(analog, cfg.dac.bits, cfg.dac.vpp,
                                               cfg.dac.clip_mode, cfg.dac.rms_backoff_db);

    const DigitalWaveform rx =
        cfg.bypass_channel
            ? dac_out
            : channel::run_channel(dac_out, cfg.channel, rop_dbm, dsp::mix_seed(seed, 0x6368616eULL));

    // Symbol-aided synchronization against a shaped prefix of the sequence.
    const std::size_t n_ref =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.sync_symbols), cfg.n_symbols / 4);
    if (n_ref < 16) throw ConfigError("too few symbols for synchronization");
    const std::vector<double> ref_levels(levels.begin(),
                                         levels.begin() + static_cast<std::ptrdiff_t>(n_ref));
    const auto reference = txchain::shape_and_resample(ref_levels, shaper, rx.rate_gsa);
    const double sps = rx.rate_gsa / cfg.symbol_rate_gbd;
    const double delay = rxdsp::synchronize(rx, reference, sps);

    auto y = rxdsp::resample_1sps(rx, delay, cfg.symbol_rate_gbd, cfg.n_symbols);
    const double y_mean = dsp::mean(y);
    for (auto& v : y) v -= y_mean;
    const double y_rms = dsp::rms(y);
    if (y_rms > 0.0)
        for (auto& v : y) v /= y_rms;

    const auto eq = rxdsp::run_equalizer(y, levels, dist, cfg.equalizer, cfg.decision_rule);

    // Payload: skip the training prefix and an edge guard at the tail where
    // interpolation and equalizer windows run past the capture.
    std::size_t p0 = std::min<std::size_t>(static_cast<std::size_t>(cfg.equalizer.train_symbols),
                                           cfg.n_symbols);
    std::size_t p1 = (cfg.n_symbols > 256) ? cfg.n_symbols - 256 : cfg.n_symbols;
    if (order == 6) {
        p0 += p0 % 2;
        p1 -= p1 % 2;
    }
    if (p1 <= p0) throw ConfigError("no payload symbols left after training and guards");

    const std::vector<int> rx_idx(eq.decided.begin() + static_cast<std::ptrdiff_t>(p0),
                                  eq.decided.begin() + static_cast<std::ptrdiff_t>(p1));
    const std::vector<int> tx_idx(indices.begin() + static_cast<std::ptrdiff_t>(p0),
                                  indices.begin() + static_cast<std::ptrdiff_t>(p1));
    const auto count = rxdsp::demap_and_count(rx_idx, tx_idx, order);

    if (artifacts) {
        artifacts->rx_capture = rx;
        artifacts->equalized.assign(eq.equalized.begin() + static_cast<std::ptrdiff_t>(p0),
                                    eq.equalized.begin() + static_cast<std::ptrdiff_t>(p1));
        artifacts->weights = eq.state.weights;
        artifacts->sync_delay = delay;
        artifacts->tx_indices = indices;
        artifacts->decided = eq.decided;
    }

    metrics::BerPoint p;
    p.rop_dbm = rop_dbm;
    p.bits = count.bits;
    p.errors = count.errors;
    p.ber = count.ber;
    return p;
}

// ---------------------------------------------------------------------------
// Sweep

int worker_count_from_env() {
    if (const char* env = std::getenv("PAMSIM_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1 && v <= 256) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

namespace {

std::string sens_status_name(metrics::SensitivityResult::Status s) {
    switch (s) {
        case metrics::SensitivityResult::Status::reached: return "reached";
        case metrics::SensitivityResult::Status::not_reached: return "not_reached";
        case metrics::SensitivityResult::Status::below_range: return "below_range";
    }
    return "not_reached";
}

SweepResult finish_sweep(const RunConfig& cfg, std::vector<metrics::BerPoint> points) {
    SweepResult res;
    res.curve.points = std::move(points);
    res.curve.descriptor = descriptor(cfg);
    try {
        res.sens = metrics::sensitivity(res.curve, 3.8e-3);
    } catch (const NumericalError& e) {
        res.sens_error = e.what();
    }

    const std::string hash = config_hash(cfg);
    char head[128];
    std::snprintf(head, sizeof(head), "config_hash=%s master_seed=%llu", hash.c_str(),
                  static_cast<unsigned long long>(cfg.master_seed));

    // CSV: format,symbol_rate_gbd,entropy,polarity,rop_dbm,ber,bits,errors,reliable
    std::string csv = std::string("# ") + head + "\n";
    csv += "format,symbol_rate_gbd,entropy,polarity,rop_dbm,ber,bits,errors,reliable\n";
    char row[256];
    const double entropy = effective_entropy(cfg);
    for (const auto& p : res.curve.points) {
        std::snprintf(row, sizeof(row), "%s,%.10g,%.10g,%s,%.10g,%.10g,%llu,%llu,%d\n",
                      to_name(cfg.modulation), cfg.symbol_rate_gbd, entropy, to_name(cfg.shaping),
                      p.rop_dbm, p.ber, static_cast<unsigned long long>(p.bits),
                      static_cast<unsigned long long>(p.errors), p.reliable() ? 1 : 0);
        csv += row;
    }
    res.csv = csv;

    json j;
    j["schema_version"] = 1;
    j["config_hash"] = hash;
    j["master_seed"] = cfg.master_seed;
    j["descriptor"] = res.curve.descriptor;
    j["threshold_ber"] = 3.8e-3;
    json pts = json::array();
    for (const auto& p : res.curve.points)
        pts.push_back({{"rop_dbm", p.rop_dbm},
                       {"ber", p.ber},
                       {"bits", p.bits},
                       {"errors", p.errors},
                       {"reliable", p.reliable()}});
    j["points"] = pts;
    if (res.sens) {
        json s;
        s["status"] = sens_status_name(res.sens->status);
        if (res.sens->status != metrics::SensitivityResult::Status::not_reached)
            s["rop_dbm"] = res.sens->rop_dbm;
        if (res.sens->status == metrics::SensitivityResult::Status::reached) {
            s["bracket_lo_rop"] = res.sens->bracket_lo_rop;
            s["bracket_hi_rop"] = res.sens->bracket_hi_rop;
        }
        s["excluded_zero_ber_rops"] = res.sens->excluded_zero_ber_rops;
        j["sensitivity"] = s;
    } else {
        j["sensitivity_error"] = res.sens_error;
    }
    res.json = j.dump(2) + "\n";
    return res;
}

} // namespace

SweepResult run_sweep(const RunConfig& cfg, int workers) {
    validate(cfg);
    if (cfg.rop_sweep_dbm.empty()) throw ConfigError("rop_sweep_dbm is empty");
    for (std::size_t i = 1; i < cfg.rop_sweep_dbm.size(); ++i)
        if (cfg.rop_sweep_dbm[i] <= cfg.rop_sweep_dbm[i - 1])
            throw ConfigError("rop_sweep_dbm must be strictly increasing");
    if (workers <= 0) workers = worker_count_from_env();

    struct Job {
        std::size_t rop_idx;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t ri = 0; ri < cfg.rop_sweep_dbm.size(); ++ri)
        for (int si = 0; si < cfg.seeds_per_point; ++si)
            jobs.push_back({ri, dsp::mix_seed(cfg.master_seed,
                                              ri * static_cast<std::size_t>(cfg.seeds_per_point) +
                                                  static_cast<std::size_t>(si))});

    std::vector<metrics::BerPoint> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                results[i] = simulate_point(cfg, cfg.rop_sweep_dbm[jobs[i].rop_idx], jobs[i].seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = std::min<int>(workers, static_cast<int>(jobs.size()));
    if (nthreads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Merge seeds per ROP point (error and bit counts add).
    std::vector<metrics::BerPoint> merged(cfg.rop_sweep_dbm.size());
    for (std::size_t ri = 0; ri < merged.size(); ++ri) merged[ri].rop_dbm = cfg.rop_sweep_dbm[ri];
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& m = merged[jobs[i].rop_idx];
        m.bits += results[i].bits;
        m.errors += results[i].errors;
    }
    for (auto& m : merged)
        m.ber = m.bits ? static_cast<double>(m.errors) / static_cast<double>(m.bits) : 0.0;

    return finish_sweep(cfg, std::move(merged));
}

SweepResult sweep_from_points(const RunConfig& cfg, const std::vector<metrics::BerPoint>& points) {
    return finish_sweep(cfg, points);
}

std::vector<std::string> write_sweep_outputs(const RunConfig& cfg, const SweepResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string csv_path = (fs::path(cfg.output_dir) / "sweep.csv").string();
    const std::string json_path = (fs::path(cfg.output_dir) / "sweep.json").string();
    std::ofstream(csv_path) << res.csv;
    std::ofstream(json_path) << res.json;
    return {csv_path, json_path};
}

} // namespace pamsim::runner
