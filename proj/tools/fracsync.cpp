// Command-line front end: every experiment is reachable either through a JSON
// config (`fracsync run config.json`) or through a dedicated subcommand whose
// flags mirror the config fields.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsync/fracsync.hpp"

namespace {

struct CommonFlags {
    std::uint64_t seed = 1;
    std::uint64_t trials = 0;
    unsigned threads = 0;
    std::string out;
    double t0 = 0.0, t1 = 0.0;
    std::uint64_t n = 0;
    std::uint64_t dim = 0;
    double hurst1 = 0.0, hurst2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    std::vector<double> b1, b2;
    std::string drift_f, drift_g;
    std::vector<double> offset_f, offset_g;
    double L = 0.0;
    std::vector<double> kappas;
    double tail = 0.0;
    double alpha = 0.0;
    std::vector<double> start_times;
    double radius0 = 0.0;
    std::vector<double> x0, y0;
    double ergodic_T = 0.0;
    double tolerance = 0.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "base RNG seed");
    cmd->add_option("--trials", f.trials, "ensemble size");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--t0", f.t0, "window start");
    cmd->add_option("--t1", f.t1, "window end");
    cmd->add_option("--n", f.n, "window steps");
    cmd->add_option("--dim", f.dim, "state dimension");
    cmd->add_option("--hurst1", f.hurst1, "Hurst parameter of channel 1");
    cmd->add_option("--hurst2", f.hurst2, "Hurst parameter of channel 2");
    cmd->add_option("--a1", f.a1, "multiplicative coefficient, channel 1");
    cmd->add_option("--a2", f.a2, "multiplicative coefficient, channel 2");
    cmd->add_option("--b1", f.b1, "additive noise vector, channel 1");
    cmd->add_option("--b2", f.b2, "additive noise vector, channel 2");
    cmd->add_option("--drift-f", f.drift_f, "drift catalog name for f");
    cmd->add_option("--drift-g", f.drift_g, "drift catalog name for g");
    cmd->add_option("--offset-f", f.offset_f, "affine offset for f");
    cmd->add_option("--offset-g", f.offset_g, "affine offset for g");
    cmd->add_option("--dissipativity-L", f.L, "shared one-sided Lipschitz constant");
    cmd->add_option("--kappas", f.kappas, "coupling strengths, increasing");
    cmd->add_option("--tail", f.tail, "fOU truncation tail length");
    cmd->add_option("--alpha", f.alpha, "certified Hoelder exponent");
    cmd->add_option("--start-times", f.start_times, "pullback start times (negative)");
    cmd->add_option("--radius0", f.radius0, "pullback cloud radius");
    cmd->add_option("--x0", f.x0, "initial state, channel 1");
    cmd->add_option("--y0", f.y0, "initial state, channel 2");
    cmd->add_option("--ergodic-T", f.ergodic_T, "time-average horizon");
    cmd->add_option("--tolerance", f.tolerance, "experiment tolerance override");
}

nlohmann::json flags_to_json(const std::string& experiment, const CLI::App* cmd,
                             const CommonFlags& f) {
    nlohmann::json j{{"experiment", experiment}};
    auto set_if = [&](const char* flag, const char* key, auto value) {
        if (cmd->count(flag)) j[key] = value;
    };
    set_if("--seed", "seed", f.seed);
    set_if("--trials", "trials", f.trials);
    set_if("--threads", "threads", f.threads);
    set_if("--out", "out", f.out);
    if (cmd->count("--t0") || cmd->count("--t1") || cmd->count("--n")) {
        nlohmann::json grid = nlohmann::json::object();
        if (cmd->count("--t0")) grid["t0"] = f.t0;
        if (cmd->count("--t1")) grid["t1"] = f.t1;
        if (cmd->count("--n")) grid["n"] = f.n;
        j["grid"] = grid;
    }
    set_if("--dim", "dim", f.dim);
    set_if("--hurst1", "hurst1", f.hurst1);
    set_if("--hurst2", "hurst2", f.hurst2);
    set_if("--a1", "a1", f.a1);
    set_if("--a2", "a2", f.a2);
    set_if("--b1", "b1", f.b1);
    set_if("--b2", "b2", f.b2);
    if (cmd->count("--drift-f") || cmd->count("--offset-f")) {
        nlohmann::json d = nlohmann::json::object();
        d["name"] = cmd->count("--drift-f") ? f.drift_f : "affine";
        if (cmd->count("--offset-f")) d["offset"] = f.offset_f;
        j["drift_f"] = d;
    }
    if (cmd->count("--drift-g") || cmd->count("--offset-g")) {
        nlohmann::json d = nlohmann::json::object();
        d["name"] = cmd->count("--drift-g") ? f.drift_g : "affine";
        if (cmd->count("--offset-g")) d["offset"] = f.offset_g;
        j["drift_g"] = d;
    }
    set_if("--dissipativity-L", "dissipativity_L", f.L);
    set_if("--kappas", "kappas", f.kappas);
    set_if("--tail", "tail_length", f.tail);
    set_if("--alpha", "alpha", f.alpha);
    set_if("--start-times", "start_times", f.start_times);
    set_if("--radius0", "radius0", f.radius0);
    set_if("--x0", "x0", f.x0);
    set_if("--y0", "y0", f.y0);
    set_if("--ergodic-T", "ergodic_T", f.ergodic_T);
    set_if("--tolerance", "tolerance", f.tolerance);
    return j;
}

// Subcommand-specific defaults applied before the user's flags.
nlohmann::json subcommand_defaults(const std::string& experiment) {
    if (experiment == "generate-fbm")
        return {{"grid", {{"t0", 0.0}, {"t1", 1.0}, {"n", 1024}}}, {"trials", 1}};
    if (experiment == "fou")
        return {{"grid", {{"t0", 0.0}, {"t1", 500.0}, {"n", 2000}}},
                {"hurst1", 0.55},
                {"trials", 100}};
    if (experiment == "equivalence")
        return {{"grid", {{"t0", 0.0}, {"t1", 1.0}, {"n", 4096}}},
                {"b1", 0.0},
                {"a1", 1.0},
                {"trials", 50}};
    if (experiment == "case-multiplicative") return {{"b1", 0.0}, {"b2", 0.0}};
    if (experiment == "case-mixed") return {{"a1", 0.5}};
    return nlohmann::json::object();
}

int dispatch(const nlohmann::json& config_json) {
    const fracsync::ExperimentConfig cfg = fracsync::parse_config(config_json);
    const int code = fracsync::run_experiment(cfg);
    if (code == 0)
        std::cout << cfg.experiment << ": all verdicts passed; artifacts in '" << cfg.out_dir
                  << "'\n";
    else
        std::cerr << cfg.experiment << ": verdict FAILED; artifacts in '" << cfg.out_dir
                  << "'\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracsync: pathwise synchronization experiments for SDEs driven by "
                 "linear multiplicative fractional Brownian motion"};
    app.require_subcommand(1);

    // run <config.json>
    std::string config_path;
    std::string run_out;
    unsigned run_threads = 0;
    bool have_seed_override = false;
    std::uint64_t seed_override = 0;
    CLI::App* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("config", config_path, "path to the config JSON")->required();
    run->add_option("--out", run_out, "output directory override");
    run->add_option("--threads", run_threads, "worker threads override");
    run->add_option("--seed-override", seed_override, "replace the config seed")
        ->each([&](const std::string&) { have_seed_override = true; });

    const std::vector<std::string> experiments{
        "generate-fbm", "fou",        "equivalence",         "contraction", "pullback",
        "sync-sweep",   "averaged-sweep", "case-multiplicative", "case-mixed"};
    std::vector<CommonFlags> flags(experiments.size());
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(experiments[i], "run the " + experiments[i] +
                                                               " experiment from flags");
        add_common_flags(cmd, flags[i]);
        cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config '" << config_path << "'\n";
                return 2;
            }
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const std::exception& e) {
                std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
                return 2;
            }
            if (run->count("--out")) j["out"] = run_out;
            if (run->count("--threads")) j["threads"] = run_threads;
            if (have_seed_override) j["seed"] = seed_override;
            return dispatch(j);
        }
        for (std::size_t i = 0; i < experiments.size(); ++i) {
            if (cmds[i]->parsed()) {
                nlohmann::json j = subcommand_defaults(experiments[i]);
                const nlohmann::json user = flags_to_json(experiments[i], cmds[i], flags[i]);
                j.merge_patch(user);
                return dispatch(j);
            }
        }
    } catch (const fracsync::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
