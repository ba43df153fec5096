// pamsim CLI: rate planning, single-point simulation, ROP sweeps and
// eye/histogram diagnostics for the shaped-PAM IM/DD link simulator.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"
#include "pamsim/runner.hpp"
#include "pamsim/waveform.hpp"

namespace fs = std::filesystem;
using namespace pamsim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::string modulation, shaping;
    double symbol_rate = 0.0;
    double entropy = -1.0;
    double rolloff = -2.0;
    std::uint64_t n_symbols = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-c,--config", o.config_path, "run config JSON file");
    cmd->add_option("-o,--out", o.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", o.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { o.have_seed = true; });
    cmd->add_option("--modulation", o.modulation, "pam4|pam6|pam8");
    cmd->add_option("--shaping", o.shaping, "uniform|cap|cup");
    cmd->add_option("--symbol-rate", o.symbol_rate, "symbol rate in GBd");
    cmd->add_option("--entropy", o.entropy, "entropy override in bits/symbol");
    cmd->add_option("--rolloff", o.rolloff, "RRC roll-off override");
    cmd->add_option("--n-symbols", o.n_symbols, "symbols per point");
}

runner::RunConfig make_config(const CommonOpts& o) {
    runner::RunConfig cfg;
    if (!o.config_path.empty()) cfg = runner::load_config(o.config_path);
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (o.have_seed) cfg.master_seed = o.seed;
    if (!o.modulation.empty()) {
        if (o.modulation == "pam4") cfg.modulation = runner::Modulation::pam4;
        else if (o.modulation == "pam6") cfg.modulation = runner::Modulation::pam6;
        else if (o.modulation == "pam8") cfg.modulation = runner::Modulation::pam8;
        else throw ConfigError("unknown modulation: " + o.modulation);
    }
    if (!o.shaping.empty()) {
        if (o.shaping == "uniform") cfg.shaping = runner::ShapingMode::uniform;
        else if (o.shaping == "cap") cfg.shaping = runner::ShapingMode::cap;
        else if (o.shaping == "cup") cfg.shaping = runner::ShapingMode::cup;
        else throw ConfigError("unknown shaping: " + o.shaping);
    }
    if (o.symbol_rate > 0.0) cfg.symbol_rate_gbd = o.symbol_rate;
    if (o.entropy >= 0.0) cfg.entropy_override = o.entropy;
    if (o.rolloff >= -1.0) cfg.rolloff = o.rolloff;
    if (o.n_symbols > 0) cfg.n_symbols = o.n_symbols;
    return cfg;
}

std::string provenance(const runner::RunConfig& cfg, std::uint64_t seed) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# config_hash=%s seed=%llu\n",
                  runner::config_hash(cfg).c_str(), static_cast<unsigned long long>(seed));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << text;
}

int cmd_plan(const CommonOpts& o, const std::vector<double>& rates, bool dump_dist) {
    auto cfg = make_config(o);
    std::vector<double> rs = rates.empty() ? std::vector<double>{cfg.symbol_rate_gbd} : rates;
    const auto rows = runner::plan_rows(cfg, rs);
    std::cout << runner::plan_table_text(rows);
    if (dump_dist && cfg.shaping != runner::ShapingMode::uniform) {
        fs::create_directories(cfg.output_dir);
        for (const auto& row : rows) {
            if (!row.note.empty() && row.entropy == 0.0) continue;
            runner::RunConfig c = cfg;
            c.symbol_rate_gbd = row.symbol_rate_gbd;
            const auto dist = runner::make_distribution(c);
            char name[64];
            std::snprintf(name, sizeof(name), "dist-%s-%gGBd.txt",
                          cfg.shaping == runner::ShapingMode::cap ? "cap" : "cup",
                          row.symbol_rate_gbd);
            write_text((fs::path(cfg.output_dir) / name).string(),
                       provenance(c, cfg.master_seed) + shaping::distribution_text(dist));
        }
    }
    return 0;
}

int cmd_simulate(const CommonOpts& o, double rop, bool dump, bool want_eye, bool want_hist) {
    auto cfg = make_config(o);
    runner::SimArtifacts art;
    const auto point = runner::simulate_point(cfg, rop, cfg.master_seed, &art);
    std::printf("%s rop=%.3f dBm ber=%.6g errors=%llu bits=%llu%s\n",
                runner::descriptor(cfg).c_str(), point.rop_dbm, point.ber,
                static_cast<unsigned long long>(point.errors),
                static_cast<unsigned long long>(point.bits),
                point.reliable() ? "" : " (unreliable: <100 errors)");
    if (dump || want_eye || want_hist) {
        fs::create_directories(cfg.output_dir);
        const std::string prov = provenance(cfg, cfg.master_seed);
        if (dump || want_eye) {
            const double sps = art.rx_capture.rate_gsa / cfg.symbol_rate_gbd;
            const auto eye = metrics::eye_accumulate(art.rx_capture, sps);
            write_text((fs::path(cfg.output_dir) / "eye.csv").string(),
                       prov + metrics::eye_csv(eye));
        }
        if (dump || want_hist) {
            const auto hist = metrics::log_histogram(art.equalized, 256);
            write_text((fs::path(cfg.output_dir) / "hist.csv").string(),
                       prov + metrics::histogram_csv(hist));
        }
        if (dump) {
            Metadata meta{{"config_hash", runner::config_hash(cfg)},
                          {"seed", std::to_string(cfg.master_seed)}};
            write_waveform((fs::path(cfg.output_dir) / "rx.bin").string(), art.rx_capture, meta);
            write_vector((fs::path(cfg.output_dir) / "weights.bin").string(), art.weights, meta);
        }
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    auto cfg = make_config(o);
    const auto res = runner::run_sweep(cfg);
    const auto paths = runner::write_sweep_outputs(cfg, res);
    std::cout << res.csv;
    if (res.sens) {
        const auto& s = *res.sens;
        if (s.status == metrics::SensitivityResult::Status::reached)
            std::printf("sensitivity at BER %.2g: %.3f dBm\n", s.threshold_ber, s.rop_dbm);
        else if (s.status == metrics::SensitivityResult::Status::below_range)
            std::printf("sensitivity: below threshold over the whole sweep (<= %.3f dBm)\n",
                        s.rop_dbm);
        else
            std::printf("sensitivity: not reached\n");
    } else {
        std::fprintf(stderr, "%s\n", res.sens_error.c_str());
    }
    for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    return res.sens ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pamsim: IM/DD PAM link simulator with probabilistic shaping"};
    app.require_subcommand(1);

    CommonOpts plan_o, sim_o, sweep_o, eye_o, hist_o;
    std::vector<double> plan_rates;
    bool plan_dump_dist = false;
    double sim_rop = 0.0;
    bool sim_dump = false;
    double eye_rop = 0.0, hist_rop = 0.0;

    auto* plan = app.add_subcommand("plan", "rate/entropy/overhead table");
    add_common(plan, plan_o);
    plan->add_option("--rates", plan_rates, "symbol rates (GBd) to tabulate")->delimiter(',');
    plan->add_flag("--dump-dist", plan_dump_dist, "write level/probability text files");

    auto* sim = app.add_subcommand("simulate", "single deterministic run");
    add_common(sim, sim_o);
    sim->add_option("--rop", sim_rop, "received optical power in dBm");
    sim->add_flag("--dump", sim_dump, "write eye/hist/rx/weights into the output dir");

    auto* sweep = app.add_subcommand("sweep", "ROP sweep with sensitivity extraction");
    add_common(sweep, sweep_o);

    auto* eye = app.add_subcommand("eye", "run one point and write the eye diagram CSV");
    add_common(eye, eye_o);
    eye->add_option("--rop", eye_rop, "received optical power in dBm");

    auto* hist = app.add_subcommand("hist", "run one point and write the symbol histogram CSV");
    add_common(hist, hist_o);
    hist->add_option("--rop", hist_rop, "received optical power in dBm");

    try {
        app.parse(argc, argv);
        if (plan->parsed()) return cmd_plan(plan_o, plan_rates, plan_dump_dist);
        if (sim->parsed()) return cmd_simulate(sim_o, sim_rop, sim_dump, false, false);
        if (sweep->parsed()) return cmd_sweep(sweep_o);
        if (eye->parsed()) return cmd_simulate(eye_o, eye_rop, false, true, false);
        if (hist->parsed()) return cmd_simulate(hist_o, hist_rop, false, false, true);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
