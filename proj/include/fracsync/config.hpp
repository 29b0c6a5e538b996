#pragma once

#include <cstdint>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsync/drift.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

struct GridSpec {
    double t0 = 0.0;
    double t1 = 20.0;
    std::size_t n = 1280;
};

struct DriftRef {
    std::string name = "linear";
    Vec offset;  // affine offset when name == "affine"

    DriftSpec build(std::size_t dim) const {
        Vec off = offset;
        if (name == "affine" && off.empty()) off = Vec(dim, 1.0);
        if (off.size() == 1 && dim > 1) off = Vec(dim, off[0]);
        if (!off.empty() && off.size() != dim)
            throw Error("drift offset dimension does not match the state dimension");
        return drift_from_name(name, off);
    }
};

/// Full experiment description. Every field has a default so that
/// subcommands can override only what they need; validation happens both at
/// parse time (types, constraints, unknown keys) and at dispatch (per
/// experiment requirements).
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::size_t trials = 50;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::string out_dir = ".";
    GridSpec grid;
    std::size_t dim = 1;
    double hurst1 = 0.75;
    double hurst2 = 0.65;
    double a1 = 0.5;
    double a2 = 0.4;
    Vec b1{0.3};
    Vec b2{0.2};
    DriftRef drift_f{"affine", {1.0}};
    DriftRef drift_g{"affine", {-1.0}};
    double dissipativity_L = 1.0;
    Vec kappas{1.0, 10.0, 100.0};
    double tail_length = 20.0;
    double alpha = 0.7;
    Vec start_times{-5.0, -10.0, -20.0};
    double radius0 = 10.0;
    Vec x0{0.5};
    Vec y0{-0.5};
    double ergodic_T = 0.0;   // 0 = use the window end
    double tolerance = 0.0;   // 0 = experiment-specific default
};

namespace detail {

inline const std::set<std::string>& known_experiments() {
    static const std::set<std::string> names{
        "generate-fbm",   "fou",           "equivalence",
        "contraction",    "pullback",      "sync-sweep",
        "averaged-sweep", "case-multiplicative", "case-mixed"};
    return names;
}

inline Vec read_vec(const nlohmann::json& j, const std::string& path) {
    if (j.is_number()) return Vec{j.get<double>()};
    if (j.is_array()) {
        Vec v;
        for (const auto& e : j) {
            if (!e.is_number()) throw ConfigError(path, "expected numbers");
            v.push_back(e.get<double>());
        }
        if (v.empty()) throw ConfigError(path, "expected a non-empty array");
        return v;
    }
    throw ConfigError(path, "expected a number or an array of numbers");
}

inline double read_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline std::uint64_t read_uint(const nlohmann::json& j, const std::string& path,
                               bool require_positive = false) {
    if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)))
        throw ConfigError(path, require_positive ? "expected a positive integer"
                                                 : "expected a nonnegative integer");
    const auto v = j.get<std::uint64_t>();
    if (require_positive && v == 0) throw ConfigError(path, "expected a positive integer");
    return v;
}

inline DriftRef read_drift(const nlohmann::json& j, const std::string& path) {
    DriftRef ref;
    if (j.is_string()) {
        ref.name = j.get<std::string>();
        return ref;
    }
    if (!j.is_object()) throw ConfigError(path, "expected a drift name or object");
    for (const auto& [key, value] : j.items()) {
        if (key == "name") {
            if (!value.is_string()) throw ConfigError(path + ".name", "expected a string");
            ref.name = value.get<std::string>();
        } else if (key == "offset") {
            ref.offset = read_vec(value, path + ".offset");
        } else {
            throw ConfigError(path + "." + key, "unknown key");
        }
    }
    if (ref.name != "linear" && ref.name != "affine" && ref.name != "cubic")
        throw ConfigError(path + ".name", "unknown drift (catalog: linear, affine, cubic)");
    return ref;
}

}  // namespace detail

/// Parses and validates a config object. Unknown keys are rejected with
/// their field path.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    ExperimentConfig cfg;
    if (const char* env = std::getenv("FRACSYNC_OUT")) cfg.out_dir = env;

    bool have_experiment = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "experiment") {
            if (!value.is_string()) throw ConfigError("experiment", "expected a string");
            cfg.experiment = value.get<std::string>();
            have_experiment = true;
        } else if (key == "seed") {
            cfg.seed = detail::read_uint(value, "seed");
        } else if (key == "trials") {
            cfg.trials = static_cast<std::size_t>(detail::read_uint(value, "trials", true));
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(detail::read_uint(value, "threads"));
        } else if (key == "out") {
            if (!value.is_string()) throw ConfigError("out", "expected a string");
            cfg.out_dir = value.get<std::string>();
        } else if (key == "grid") {
            if (!value.is_object()) throw ConfigError("grid", "expected an object {t0, t1, n}");
            for (const auto& [gk, gv] : value.items()) {
                if (gk == "t0")
                    cfg.grid.t0 = detail::read_number(gv, "grid.t0");
                else if (gk == "t1")
                    cfg.grid.t1 = detail::read_number(gv, "grid.t1");
                else if (gk == "n") {
                    cfg.grid.n = static_cast<std::size_t>(detail::read_uint(gv, "grid.n", true));
                } else {
                    throw ConfigError("grid." + gk, "unknown key");
                }
            }
        } else if (key == "dim") {
            cfg.dim = static_cast<std::size_t>(detail::read_uint(value, "dim", true));
        } else if (key == "hurst1") {
            cfg.hurst1 = detail::read_number(value, "hurst1");
        } else if (key == "hurst2") {
            cfg.hurst2 = detail::read_number(value, "hurst2");
        } else if (key == "a1") {
            cfg.a1 = detail::read_number(value, "a1");
        } else if (key == "a2") {
            cfg.a2 = detail::read_number(value, "a2");
        } else if (key == "b1") {
            cfg.b1 = detail::read_vec(value, "b1");
        } else if (key == "b2") {
            cfg.b2 = detail::read_vec(value, "b2");
        } else if (key == "drift_f") {
            cfg.drift_f = detail::read_drift(value, "drift_f");
        } else if (key == "drift_g") {
            cfg.drift_g = detail::read_drift(value, "drift_g");
        } else if (key == "dissipativity_L") {
            cfg.dissipativity_L = detail::read_number(value, "dissipativity_L");
            if (!(cfg.dissipativity_L > 0.0))
                throw ConfigError("dissipativity_L", "must be positive");
        } else if (key == "kappas") {
            cfg.kappas = detail::read_vec(value, "kappas");
        } else if (key == "tail_length") {
            cfg.tail_length = detail::read_number(value, "tail_length");
            if (!(cfg.tail_length > 0.0)) throw ConfigError("tail_length", "must be positive");
        } else if (key == "alpha") {
            cfg.alpha = detail::read_number(value, "alpha");
            if (!(cfg.alpha > 0.5 && cfg.alpha < 1.0))
                throw ConfigError("alpha", "must lie in (0.5, 1)");
        } else if (key == "start_times") {
            cfg.start_times = detail::read_vec(value, "start_times");
        } else if (key == "radius0") {
            cfg.radius0 = detail::read_number(value, "radius0");
            if (!(cfg.radius0 > 0.0)) throw ConfigError("radius0", "must be positive");
        } else if (key == "x0") {
            cfg.x0 = detail::read_vec(value, "x0");
        } else if (key == "y0") {
            cfg.y0 = detail::read_vec(value, "y0");
        } else if (key == "ergodic_T") {
            cfg.ergodic_T = detail::read_number(value, "ergodic_T");
        } else if (key == "tolerance") {
            cfg.tolerance = detail::read_number(value, "tolerance");
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    if (!have_experiment) throw ConfigError("experiment", "missing required key");
    if (!detail::known_experiments().count(cfg.experiment))
        throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
    if (!(cfg.grid.t0 < cfg.grid.t1)) throw ConfigError("grid", "requires t0 < t1");
    if (!(cfg.hurst1 > 0.5 && cfg.hurst1 < 1.0)) throw ConfigError("hurst1", "must lie in (0.5, 1)");
    if (!(cfg.hurst2 > 0.5 && cfg.hurst2 < 1.0)) throw ConfigError("hurst2", "must lie in (0.5, 1)");
    if (cfg.a1 == 0.0) throw ConfigError("a1", "must be nonzero");
    if (cfg.experiment != "case-mixed" && cfg.a2 == 0.0) throw ConfigError("a2", "must be nonzero");
    for (std::size_t i = 1; i < cfg.kappas.size(); ++i)
        if (!(cfg.kappas[i] > cfg.kappas[i - 1]))
            throw ConfigError("kappas", "must be positive increasing");
    if (!cfg.kappas.empty() && !(cfg.kappas.front() > 0.0))
        throw ConfigError("kappas", "must be positive increasing");

    auto fix_dim = [&](Vec& v, const char* name) {
        if (v.size() == 1 && cfg.dim > 1) v = Vec(cfg.dim, v[0]);
        if (v.size() != cfg.dim) throw ConfigError(name, "dimension mismatch with 'dim'");
    };
    fix_dim(cfg.b1, "b1");
    fix_dim(cfg.b2, "b2");
    fix_dim(cfg.x0, "x0");
    fix_dim(cfg.y0, "y0");
    return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json drift_f{{"name", cfg.drift_f.name}};
    if (!cfg.drift_f.offset.empty()) drift_f["offset"] = cfg.drift_f.offset;
    nlohmann::json drift_g{{"name", cfg.drift_g.name}};
    if (!cfg.drift_g.offset.empty()) drift_g["offset"] = cfg.drift_g.offset;
    return nlohmann::json{
        {"experiment", cfg.experiment},
        {"seed", cfg.seed},
        {"trials", cfg.trials},
        {"grid", {{"t0", cfg.grid.t0}, {"t1", cfg.grid.t1}, {"n", cfg.grid.n}}},
        {"dim", cfg.dim},
        {"hurst1", cfg.hurst1},
        {"hurst2", cfg.hurst2},
        {"a1", cfg.a1},
        {"a2", cfg.a2},
        {"b1", cfg.b1},
        {"b2", cfg.b2},
        {"drift_f", drift_f},
        {"drift_g", drift_g},
        {"dissipativity_L", cfg.dissipativity_L},
        {"kappas", cfg.kappas},
        {"tail_length", cfg.tail_length},
        {"alpha", cfg.alpha},
        {"start_times", cfg.start_times},
        {"radius0", cfg.radius0},
        {"x0", cfg.x0},
        {"y0", cfg.y0},
        {"ergodic_T", cfg.ergodic_T},
        {"tolerance", cfg.tolerance}};
}

}  // namespace fracsync
