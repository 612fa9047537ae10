// uamsim: closed-loop scenario runner, controller comparison and gain
// checking for the dual-arm aerial manipulator library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uam/sim/config.hpp"
#include "uam/sim/metrics.hpp"
#include "uam/sim/runner.hpp"
#include "uam/sim/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct CommonOpts {
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    std::string format = "both";   // csv | json | both
    std::uint64_t seed = 0;
    bool seed_set = false;
};

uam::sim::SimConfig load_config(const CommonOpts& o) {
    using uam::sim::SimConfig;
    SimConfig cfg = o.config_path.empty() ? SimConfig{} : SimConfig::from_file(o.config_path);
    if (!o.scenario.empty()) cfg.scenario = uam::sim::scenario_from_string(o.scenario);
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--scenario", o.scenario, "figure-eight | spiral | delivery");
    cmd->add_option("--seed", o.seed, "override the config seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
}

void write_outputs(const uam::sim::SimConfig& cfg, const uam::sim::RunResult& res,
                   const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string stem =
        cfg.out_dir + "/" + res.trace.scenario + "_" + res.trace.controller;
    if (format != "json") {
        uam::sim::save_csv(res.trace, stem + ".csv");
        std::cout << "wrote " << stem << ".csv (" << res.trace.rows.size() << " rows)\n";
    }
    if (format != "csv") {
        std::ofstream out(stem + "_summary.json");
        out << res.summary(cfg).dump(2) << "\n";
        std::cout << "wrote " << stem << "_summary.json\n";
    }
    if (res.has_dnn) {
        uam::save_weights(res.dnn, stem + "_weights.txt");
        std::cout << "wrote " << stem << "_weights.txt\n";
    }
}

uam::GainCertificate certificate_from_config(const std::string& path) {
    uam::GainCertificate cert;
    if (path.empty()) return cert;
    std::ifstream in(path);
    if (!in) throw uam::sim::ConfigError("cannot open config file " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("certificate")) return cert;
    const auto& c = j.at("certificate");
    if (c.contains("zeta1")) cert.zeta1 = c.at("zeta1").get<double>();
    if (c.contains("zeta2")) cert.zeta2 = c.at("zeta2").get<double>();
    if (c.contains("zeta3")) cert.zeta3 = c.at("zeta3").get<double>();
    if (c.contains("zeta4")) cert.zeta4 = c.at("zeta4").get<double>();
    if (c.contains("zeta5")) cert.zeta5 = c.at("zeta5").get<double>();
    if (c.contains("beta2_max")) cert.beta2_max = c.at("beta2_max").get<double>();
    if (c.contains("rho")) cert.rho = c.at("rho").get<double>();
    return cert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-arm aerial manipulator tracking simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, cmp_opts, gains_opts;
    std::string run_controller = "dnn-rise";
    auto* run_cmd = app.add_subcommand("run", "run one scenario and write its trace");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--controller", run_controller, "dnn-rise | baseline | both")
        ->check(CLI::IsMember({"dnn-rise", "baseline", "both"}));

    auto* cmp_cmd =
        app.add_subcommand("compare", "run both controllers and report the error table");
    add_common(cmp_cmd, cmp_opts);

    std::string metrics_dnn, metrics_base;
    double metrics_warmup = 10.;
    auto* met_cmd = app.add_subcommand("metrics", "compare two previously written traces");
    met_cmd->add_option("dnn_trace", metrics_dnn, "trace CSV of the adaptive controller")
        ->required();
    met_cmd->add_option("baseline_trace", metrics_base, "trace CSV of the baseline")->required();
    met_cmd->add_option("--warmup", metrics_warmup, "steady-window start time [s]");

    auto* gains_cmd =
        app.add_subcommand("check-gains", "evaluate the sufficient gain conditions");
    add_common(gains_cmd, gains_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const auto cfg = load_config(run_opts);
            int rc = kExitOk;
            const auto run_one = [&](uam::sim::ControllerKind kind) {
                const auto res = uam::sim::run_scenario(cfg, kind);
                write_outputs(cfg, res, run_opts.format);
                if (res.diverged) {
                    std::cerr << "run diverged at t=" << res.trace.rows.back().t << " s\n";
                    rc = kExitDiverged;
                }
            };
            if (run_controller == "both" || run_controller == "dnn-rise")
                run_one(uam::sim::ControllerKind::dnn_rise);
            if (run_controller == "both" || run_controller == "baseline")
                run_one(uam::sim::ControllerKind::baseline);
            return rc;
        }

        if (*cmp_cmd) {
            const auto cfg = load_config(cmp_opts);
            auto res = uam::sim::compare_controllers(cfg);
            write_outputs(cfg, res.dnn_rise, cmp_opts.format);
            write_outputs(cfg, res.baseline, cmp_opts.format);
            std::cout << "\nsteady-window error comparison (warmup " << cfg.metrics_warmup
                      << " s, " << res.metrics.window_samples << " samples)\n"
                      << res.metrics.table();
            std::filesystem::create_directories(cfg.out_dir);
            nlohmann::json mj;
            mj["warmup"] = res.metrics.warmup;
            mj["dnn_rise"] = {{"max", res.metrics.dnn_rise.max_abs},
                              {"mean", res.metrics.dnn_rise.mean_abs}};
            mj["baseline"] = {{"max", res.metrics.baseline.max_abs},
                              {"mean", res.metrics.baseline.mean_abs}};
            mj["max_reduction_pct"] = res.metrics.max_reduction_pct;
            mj["mean_reduction_pct"] = res.metrics.mean_reduction_pct;
            std::ofstream out(cfg.out_dir + "/" + res.dnn_rise.trace.scenario + "_metrics.json");
            out << mj.dump(2) << "\n";
            return kExitOk;
        }

        if (*met_cmd) {
            const auto dnn = uam::sim::load_csv(metrics_dnn);
            const auto base = uam::sim::load_csv(metrics_base);
            const auto rep = uam::sim::compute_metrics(dnn, base, metrics_warmup);
            std::cout << rep.table();
            return kExitOk;
        }

        if (*gains_cmd) {
            const auto cfg = load_config(gains_opts);
            const auto cert = certificate_from_config(gains_opts.config_path);
            const auto rep = uam::check_gain_conditions(cfg.gains, cert);
            std::cout << rep.summary();
            return kExitOk;
        }
    } catch (const uam::sim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
