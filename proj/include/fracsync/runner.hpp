#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracsync/config.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/io.hpp"
#include "fracsync/regularity.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/sync.hpp"
#include "fracsync/transform.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

struct RunOutcome {
    bool pass = false;
    nlohmann::json verdict;
};

namespace detail {

inline std::string num_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::string run_label(const ExperimentConfig& cfg, double kappa = 0.0) {
    return cfg.experiment + "_seed" + std::to_string(cfg.seed) + "_kappa" + num_label(kappa) +
           "_H1-" + num_label(cfg.hurst1) + "_H2-" + num_label(cfg.hurst2);
}

/// Window grid extended backward by at least the fOU tail, on the same
/// lattice; `refine` subdivides each window step.
inline TimeGrid noise_grid_for(const GridSpec& grid, double tail, std::size_t refine = 1) {
    const double h = (grid.t1 - grid.t0) / static_cast<double>(grid.n) /
                     static_cast<double>(refine);
    std::size_t extra = static_cast<std::size_t>(std::ceil(tail / h - 1e-9));
    if (refine > 1 && extra % refine != 0) extra += refine - extra % refine;
    return TimeGrid(grid.t0 - static_cast<double>(extra) * h, grid.t1,
                    grid.n * refine + extra);
}

inline TimeGrid window_grid(const GridSpec& grid) { return TimeGrid(grid.t0, grid.t1, grid.n); }

inline nlohmann::json verdict_json(const ExperimentConfig& cfg, double statistic,
                                   double tolerance, bool pass, nlohmann::json details) {
    details["step"] = (cfg.grid.t1 - cfg.grid.t0) / static_cast<double>(cfg.grid.n);
    return nlohmann::json{{"experiment", cfg.experiment}, {"params", config_to_json(cfg)},
                          {"statistic", statistic},       {"tolerance", tolerance},
                          {"pass", pass},                 {"details", std::move(details)}};
}

inline double fraction_true(const std::vector<char>& flags) {
    double s = 0.0;
    for (char f : flags) s += f ? 1.0 : 0.0;
    return flags.empty() ? 0.0 : s / static_cast<double>(flags.size());
}

}  // namespace detail

namespace driver {

inline RunOutcome generate_fbm(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const TimeGrid grid = detail::window_grid(cfg.grid);
    const FbmSampler sampler(grid, HurstParameter(cfg.hurst1));
    std::vector<SamplePath> paths;
    paths.reserve(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k) paths.push_back(sampler.sample({cfg.seed, k}));

    double sup = 0.0;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
        for (std::size_t i = 0; i < paths[k].points(); ++i)
            sup = std::max(sup, std::abs(paths[k].at(i)));
        out.write(detail::run_label(cfg) + "_trial" + std::to_string(k) + ".csv",
                  path_to_csv(paths[k]));
    }
    out.write(detail::run_label(cfg) + "_trial0.fsync", path_to_binary(paths[0]));
    RunOutcome outcome;
    outcome.pass = true;
    outcome.verdict = detail::verdict_json(
        cfg, sup, 0.0, true,
        {{"paths", cfg.trials},
         {"method", sampler.method() == FbmSampler::Method::circulant ? "circulant" : "cholesky"}});
    return outcome;
}

inline RunOutcome fou_experiment(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const TimeGrid window = detail::window_grid(cfg.grid);
    const TimeGrid noise_grid = detail::noise_grid_for(cfg.grid, cfg.tail_length);
    const FbmSampler sampler(noise_grid, HurstParameter(cfg.hurst1));
    const FouConfig fou_cfg{1.0, cfg.tail_length};

    const double T = cfg.ergodic_T > 0.0 ? cfg.ergodic_T : cfg.grid.t1;
    const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 0.05;
    const bool can_average =
        window.index_of(0.0).has_value() && window.index_of(T).has_value();

    Vec averages(cfg.trials, 0.0);
    std::vector<SamplePath> first(1, SamplePath(window, 1));
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const SamplePath noise = sampler.sample({cfg.seed, k});
        const SamplePath o = fou_stationary(noise, window, fou_cfg);
        if (can_average) averages[k] = ergodic_average(o, T);
        if (k == 0) first[0] = o;
    });

    out.write(detail::run_label(cfg) + "_trial0.csv", path_to_csv(first[0]));
    Vec abs_avg = averages;
    for (auto& v : abs_avg) v = std::abs(v);
    const double stat = can_average ? mean(abs_avg) : 0.0;
    Vec trial_ids(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k) trial_ids[k] = static_cast<double>(k);
    out.write(detail::run_label(cfg) + "_ergodic.csv",
              columns_to_csv({"trial", "time_average"}, {trial_ids, averages}));

    RunOutcome outcome;
    outcome.pass = !can_average || stat < tol;
    outcome.verdict = detail::verdict_json(
        cfg, stat, tol, outcome.pass,
        {{"diagnostic", {{"T", T}, {"value", stat}, {"tolerance", tol}, {"pass", outcome.pass}}},
         {"averaged", can_average}});
    return outcome;
}

inline RunOutcome equivalence(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const TimeGrid window = detail::window_grid(cfg.grid);
    const TimeGrid noise_grid = detail::noise_grid_for(cfg.grid, cfg.tail_length, 2);
    const FbmSampler sampler(noise_grid, HurstParameter(cfg.hurst1));
    const DriftSpec drift = cfg.drift_f.build(cfg.dim);
    const LinearNoiseCoeffs coeffs(cfg.a1, cfg.b1);
    const FouConfig fou_cfg{1.0, cfg.tail_length};

    Vec ratios(cfg.trials), dists(cfg.trials), envelopes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const SamplePath noise = sampler.sample({cfg.seed, k});
        const EquivalenceReport rep =
            equivalence_harness(drift, coeffs, noise, cfg.x0, window, cfg.alpha, 2, fou_cfg);
        ratios[k] = rep.ratio;
        dists[k] = rep.sup_distances.front();
        envelopes[k] = rep.envelope;
    });

    Vec trial_ids(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k) trial_ids[k] = static_cast<double>(k);
    out.write(detail::run_label(cfg) + "_harness.csv",
              columns_to_csv({"trial", "sup_distance", "envelope", "ratio"},
                             {trial_ids, dists, envelopes, ratios}));

    const double stat = median(ratios);
    RunOutcome outcome;
    outcome.pass = stat <= 3.0;
    outcome.verdict = detail::verdict_json(
        cfg, stat, 3.0, outcome.pass,
        {{"median_sup_distance", median(dists)}, {"median_envelope", median(envelopes)}});
    return outcome;
}

inline RunOutcome contraction(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const TimeGrid window = detail::window_grid(cfg.grid);
    const TimeGrid noise_grid = detail::noise_grid_for(cfg.grid, cfg.tail_length);
    const FbmSampler sampler(noise_grid, HurstParameter(cfg.hurst1));
    const DriftSpec drift = cfg.drift_f.build(cfg.dim);
    const LinearNoiseCoeffs coeffs(cfg.a1, cfg.b1);
    const FouConfig fou_cfg{1.0, cfg.tail_length};

    Vec slopes(cfg.trials), bounds(cfg.trials);
    std::vector<SyncReport> first(1);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const SamplePath noise = sampler.sample({cfg.seed, k});
        const SamplePath o = fou_stationary(noise, window, fou_cfg);
        const SyncReport rep =
            contraction_test(drift, coeffs, o, {{cfg.x0, cfg.y0}}, window);
        slopes[k] = rep.fitted_rate;
        bounds[k] = rep.eigenvalue_bound;
        if (k == 0) first[0] = rep;
    });

    Vec trial_ids(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k) trial_ids[k] = static_cast<double>(k);
    out.write(detail::run_label(cfg) + "_slopes.csv",
              columns_to_csv({"trial", "slope", "bound"}, {trial_ids, slopes, bounds}));
    Vec ts, gs;
    for (const auto& [t, g] : first[0].gap_trajectory) {
        ts.push_back(t);
        gs.push_back(g);
    }
    out.write(detail::run_label(cfg) + "_gap_trial0.csv",
              columns_to_csv({"t", "gap_sq"}, {ts, gs}));

    const double stat = median(slopes);
    const double tol = -cfg.dissipativity_L;
    RunOutcome outcome;
    outcome.pass = stat <= tol;
    outcome.verdict = detail::verdict_json(cfg, stat, tol, outcome.pass,
                                           {{"median_rate_bound", median(bounds)}});
    return outcome;
}

inline RunOutcome pullback(ArtifactWriter& out, const ExperimentConfig& cfg) {
    Vec starts = cfg.start_times;
    std::sort(starts.begin(), starts.end());
    if (starts.empty() || starts.front() >= 0.0)
        throw ConfigError("start_times", "expected negative start times");
    const double h = (cfg.grid.t1 - cfg.grid.t0) / static_cast<double>(cfg.grid.n);
    const double t_min = starts.front();
    const auto steps = static_cast<std::size_t>(std::llround(-t_min / h));
    if (std::abs(static_cast<double>(steps) * h + t_min) > 1e-9)
        throw ConfigError("start_times", "start times must be grid multiples");
    GridSpec fou_grid{t_min, 0.0, steps};
    const TimeGrid window = detail::window_grid(fou_grid);
    const TimeGrid noise_grid = detail::noise_grid_for(fou_grid, cfg.tail_length);
    const FbmSampler sampler(noise_grid, HurstParameter(cfg.hurst1));
    const DriftSpec drift = cfg.drift_f.build(cfg.dim);
    const LinearNoiseCoeffs coeffs(cfg.a1, cfg.b1);
    const FouConfig fou_cfg{1.0, cfg.tail_length};

    std::vector<PullbackReport> reports(cfg.trials,
                                        PullbackReport{});
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const SamplePath noise = sampler.sample({cfg.seed, k});
        const SamplePath o = fou_stationary(noise, window, fou_cfg);
        reports[k] = pullback_attractor_estimate(drift, coeffs, o, cfg.start_times, cfg.radius0);
    });

    const std::size_t n_starts = reports[0].start_times.size();
    Vec med_diams(n_starts);
    for (std::size_t s = 0; s < n_starts; ++s) {
        Vec d(cfg.trials);
        for (std::size_t k = 0; k < cfg.trials; ++k) d[k] = reports[k].diameters[s];
        med_diams[s] = median(d);
    }
    out.write(detail::run_label(cfg) + "_diameters.csv",
              columns_to_csv({"start_time", "median_diameter"},
                             {reports[0].start_times, med_diams}));

    bool decreasing = true;
    for (std::size_t s = 1; s < n_starts; ++s)
        if (!(med_diams[s] < med_diams[s - 1])) decreasing = false;
    const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-3;
    const double stat = med_diams.back();
    RunOutcome outcome;
    outcome.pass = decreasing && stat < tol;
    outcome.verdict = detail::verdict_json(
        cfg, stat, tol, outcome.pass,
        {{"median_diameters", med_diams}, {"strictly_decreasing", decreasing}});
    return outcome;
}

struct CoupledSetup {
    TimeGrid window;
    std::vector<SamplePath> fou1;  // per trial
    std::vector<SamplePath> fou2;
    CoupledConfig base;
};

inline CoupledSetup coupled_setup(const ExperimentConfig& cfg) {
    const TimeGrid window = detail::window_grid(cfg.grid);
    const TimeGrid noise_grid = detail::noise_grid_for(cfg.grid, cfg.tail_length);
    const FbmSampler sampler1(noise_grid, HurstParameter(cfg.hurst1));
    const FbmSampler sampler2(noise_grid, HurstParameter(cfg.hurst2));
    const FouConfig fou_cfg{1.0, cfg.tail_length};

    CoupledSetup setup{window,
                       std::vector<SamplePath>(cfg.trials, SamplePath(window, 1)),
                       std::vector<SamplePath>(cfg.trials, SamplePath(window, 1)),
                       CoupledConfig{LinearNoiseCoeffs(cfg.a1, cfg.b1),
                                     LinearNoiseCoeffs(cfg.a2 != 0.0 ? cfg.a2 : 1.0, cfg.b2),
                                     cfg.drift_f.build(cfg.dim), cfg.drift_g.build(cfg.dim),
                                     HurstParameter(cfg.hurst1), HurstParameter(cfg.hurst2),
                                     0.0, cfg.dissipativity_L}};
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        setup.fou1[k] = fou_stationary(sampler1.sample({cfg.seed, 2 * k}), window, fou_cfg);
        setup.fou2[k] = fou_stationary(sampler2.sample({cfg.seed, 2 * k + 1}), window, fou_cfg);
    });
    return setup;
}

/// Median-aggregated eigenvalue/comparison verdict over trials and kappas.
inline nlohmann::json eig_study(const ExperimentConfig& cfg, const CoupledSetup& setup,
                                bool mixed, bool& pass) {
    nlohmann::json per_kappa = nlohmann::json::array();
    pass = true;
    // Distinct starts with opposite-sign channel differences, so the
    // componentwise comparison starts with genuine Cauchy-Schwarz slack.
    const CoupledState sa{cfg.x0, cfg.y0};
    CoupledState sb{cfg.x0, cfg.y0};
    sb.u[0] -= 1.0;
    sb.v[0] += 0.5;
    for (double kappa : cfg.kappas) {
        std::vector<char> ok(cfg.trials, 0);
        Vec violations(cfg.trials), prop_violations(cfg.trials), onsets(cfg.trials);
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
            EigenBoundReport rep;
            if (mixed) {
                MixedConfig mix{cfg.a1, cfg.b1, cfg.b2, setup.base.drift_f, setup.base.drift_g,
                                cfg.dissipativity_L};
                rep = mixed_contraction_eigs(mix, kappa, setup.fou1[k], setup.fou2[k],
                                             setup.window, sa, sb);
            } else {
                rep = coupled_contraction_eigs(setup.base.with_kappa(kappa), setup.fou1[k],
                                               setup.fou2[k], setup.window, sa, sb);
            }
            ok[k] = rep.onset_found && rep.bound_holds_after_onset;
            violations[k] = rep.comparison_max_rel_violation;
            prop_violations[k] = rep.propagator_max_rel_violation;
            onsets[k] = rep.onset_found ? rep.onset_time : HUGE_VAL;
        });
        const double ok_fraction = detail::fraction_true(ok);
        const double med_violation = median(violations);
        const double med_prop_violation = median(prop_violations);
        const bool kappa_pass =
            ok_fraction >= 0.5 && med_violation <= 1e-6 && med_prop_violation <= 1e-6;
        pass = pass && kappa_pass;
        per_kappa.push_back({{"kappa", kappa},
                             {"bound_ok_fraction", ok_fraction},
                             {"median_onset", median(onsets)},
                             {"median_comparison_violation", med_violation},
                             {"median_propagator_violation", med_prop_violation},
                             {"pass", kappa_pass}});
    }
    return per_kappa;
}

inline RunOutcome sync_sweep(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const CoupledSetup setup = coupled_setup(cfg);
    const CoupledState s0{cfg.x0, cfg.y0};
    const std::size_t nk = cfg.kappas.size();

    std::vector<Vec> gaps(nk, Vec(cfg.trials));
    std::vector<SweepResult> first(1);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        SweepResult res = sync_gap_sweep(setup.base, cfg.kappas, setup.fou1[k],
                                         setup.fou2[k], setup.window, s0);
        for (std::size_t i = 0; i < nk; ++i) gaps[i][k] = res.reports[i].steady_gap;
        if (k == 0) first[0] = std::move(res);
    });
    for (std::size_t i = 0; i < nk; ++i) {
        Vec ts, gs;
        for (const auto& [t, g] : first[0].reports[i].gap_trajectory) {
            ts.push_back(t);
            gs.push_back(g);
        }
        out.write(detail::run_label(cfg, cfg.kappas[i]) + "_gap_trial0.csv",
                  columns_to_csv({"t", "gap_sq"}, {ts, gs}));
    }
    const CoupledTrajectory traj_kmax = integrate_coupled(
        setup.base.with_kappa(cfg.kappas.back()), setup.fou1[0], setup.fou2[0], s0, setup.window);
    out.write(detail::run_label(cfg, cfg.kappas.back()) + "_trajectory_trial0.csv",
              coupled_to_csv(traj_kmax));

    Vec med(nk);
    for (std::size_t i = 0; i < nk; ++i) med[i] = median(gaps[i]);
    out.write(detail::run_label(cfg) + "_median_gaps.csv",
              columns_to_csv({"kappa", "median_steady_gap"}, {cfg.kappas, med}));

    bool monotone = true;
    for (std::size_t i = 1; i < nk; ++i)
        if (med[i] > med[i - 1] * (1.0 + 1e-12) + 1e-300) monotone = false;
    bool drop_ok = true;
    double drop = med.front() > 0.0 ? med.back() / med.front() : 0.0;
    if (nk >= 2 && cfg.kappas.back() / cfg.kappas.front() >= 100.0)
        drop_ok = med.front() == 0.0 ? med.back() == 0.0 : drop <= 0.1;

    bool eig_pass = true;
    nlohmann::json eig = eig_study(cfg, setup, false, eig_pass);

    RunOutcome outcome;
    outcome.pass = monotone && drop_ok && eig_pass;
    outcome.verdict = detail::verdict_json(cfg, drop, 0.1, outcome.pass,
                                           {{"median_gaps", med},
                                            {"monotone", monotone},
                                            {"drop_ok", drop_ok},
                                            {"scheme", "strang-heun"},
                                            {"eigenvalue_study", std::move(eig)}});
    return outcome;
}

inline RunOutcome averaged_sweep(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const CoupledSetup setup = coupled_setup(cfg);
    const CoupledState s0{cfg.x0, cfg.y0};
    const std::size_t nk = cfg.kappas.size();

    std::vector<Vec> dists(nk, Vec(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const SweepResult res = averaged_limit_sweep(setup.base, cfg.kappas, setup.fou1[k],
                                                     setup.fou2[k], setup.window, s0);
        for (std::size_t i = 0; i < nk; ++i) dists[i][k] = res.reports[i].reference_distance;
    });

    Vec med(nk);
    for (std::size_t i = 0; i < nk; ++i) med[i] = median(dists[i]);
    out.write(detail::run_label(cfg) + "_median_distance.csv",
              columns_to_csv({"kappa", "median_sup_distance"}, {cfg.kappas, med}));

    bool decreasing = true;
    for (std::size_t i = 1; i < nk; ++i)
        if (!(med[i] < med[i - 1] * (1.0 + 1e-12) + 1e-12)) decreasing = false;
    RunOutcome outcome;
    outcome.pass = decreasing;
    outcome.verdict =
        detail::verdict_json(cfg, med.back(), med.front(), outcome.pass,
                             {{"median_distances", med},
                              {"strictly_decreasing", decreasing},
                              {"scheme", "strang-heun"}});
    return outcome;
}

inline RunOutcome case_multiplicative(ArtifactWriter& out, const ExperimentConfig& cfg) {
    if (norm(cfg.b1) != 0.0) throw ConfigError("b1", "must be zero for the multiplicative case");
    if (norm(cfg.b2) != 0.0) throw ConfigError("b2", "must be zero for the multiplicative case");
    const CoupledSetup setup = coupled_setup(cfg);
    const CoupledState s0{cfg.x0, cfg.y0};
    const std::size_t nk = cfg.kappas.size();

    std::vector<Vec> gaps(nk, Vec(cfg.trials)), avg_dists(nk, Vec(cfg.trials));
    Vec residuals(cfg.trials), res_tols(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const CaseReport rep = case_pure_multiplicative(setup.base, cfg.kappas, setup.fou1[k],
                                                        setup.fou2[k], setup.window, s0);
        for (std::size_t i = 0; i < nk; ++i) {
            gaps[i][k] = rep.gap_sweep.reports[i].steady_gap;
            avg_dists[i][k] = rep.averaged_sweep.reports[i].reference_distance;
        }
        residuals[k] = rep.reconstruction_residual;
        res_tols[k] = rep.reconstruction_tolerance;
    });

    Vec med_gap(nk), med_avg(nk);
    for (std::size_t i = 0; i < nk; ++i) {
        med_gap[i] = median(gaps[i]);
        med_avg[i] = median(avg_dists[i]);
    }
    out.write(detail::run_label(cfg) + "_medians.csv",
              columns_to_csv({"kappa", "median_steady_gap", "median_sup_distance"},
                             {cfg.kappas, med_gap, med_avg}));

    bool monotone = true, decreasing = true;
    for (std::size_t i = 1; i < nk; ++i) {
        if (med_gap[i] > med_gap[i - 1] * (1.0 + 1e-12) + 1e-300) monotone = false;
        if (!(med_avg[i] < med_avg[i - 1] * (1.0 + 1e-12) + 1e-12)) decreasing = false;
    }
    bool drop_ok = true;
    if (nk >= 2 && cfg.kappas.back() / cfg.kappas.front() >= 100.0)
        drop_ok = med_gap.front() == 0.0 ? med_gap.back() == 0.0
                                         : med_gap.back() / med_gap.front() <= 0.1;
    const bool recon_ok = median(residuals) <= median(res_tols);

    bool eig_pass = true;
    nlohmann::json eig = eig_study(cfg, setup, false, eig_pass);

    RunOutcome outcome;
    outcome.pass = monotone && drop_ok && decreasing && recon_ok && eig_pass;
    outcome.verdict = detail::verdict_json(
        cfg, median(residuals), median(res_tols), outcome.pass,
        {{"median_gaps", med_gap},
         {"median_distances", med_avg},
         {"monotone", monotone},
         {"drop_ok", drop_ok},
         {"averaged_decreasing", decreasing},
         {"reconstruction_ok", recon_ok},
         {"eigenvalue_study", std::move(eig)}});
    return outcome;
}

inline RunOutcome case_mixed(ArtifactWriter& out, const ExperimentConfig& cfg) {
    const CoupledSetup setup = coupled_setup(cfg);
    const CoupledState s0{cfg.x0, cfg.y0};
    const std::size_t nk = cfg.kappas.size();
    const MixedConfig mix{cfg.a1, cfg.b1, cfg.b2, setup.base.drift_f, setup.base.drift_g,
                          cfg.dissipativity_L};

    std::vector<Vec> gaps(nk, Vec(cfg.trials)), avg_dists(nk, Vec(cfg.trials));
    Vec residuals(cfg.trials), res_tols(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const CaseReport rep = case_mixed_noise(mix, cfg.kappas, setup.fou1[k], setup.fou2[k],
                                                setup.window, s0);
        for (std::size_t i = 0; i < nk; ++i) {
            gaps[i][k] = rep.gap_sweep.reports[i].steady_gap;
            avg_dists[i][k] = rep.averaged_sweep.reports[i].reference_distance;
        }
        residuals[k] = rep.reconstruction_residual;
        res_tols[k] = rep.reconstruction_tolerance;
    });

    Vec med_gap(nk), med_avg(nk);
    for (std::size_t i = 0; i < nk; ++i) {
        med_gap[i] = median(gaps[i]);
        med_avg[i] = median(avg_dists[i]);
    }
    out.write(detail::run_label(cfg) + "_medians.csv",
              columns_to_csv({"kappa", "median_steady_gap", "median_sup_distance"},
                             {cfg.kappas, med_gap, med_avg}));

    bool monotone = true, decreasing = true;
    for (std::size_t i = 1; i < nk; ++i) {
        if (med_gap[i] > med_gap[i - 1] * (1.0 + 1e-12) + 1e-300) monotone = false;
        if (!(med_avg[i] < med_avg[i - 1] * (1.0 + 1e-12) + 1e-12)) decreasing = false;
    }
    bool drop_ok = true;
    if (nk >= 2 && cfg.kappas.back() / cfg.kappas.front() >= 100.0)
        drop_ok = med_gap.front() == 0.0 ? med_gap.back() == 0.0
                                         : med_gap.back() / med_gap.front() <= 0.1;
    const bool recon_ok = median(residuals) <= median(res_tols);

    bool eig_pass = true;
    nlohmann::json eig = eig_study(cfg, setup, true, eig_pass);

    RunOutcome outcome;
    outcome.pass = monotone && drop_ok && decreasing && recon_ok && eig_pass;
    outcome.verdict = detail::verdict_json(
        cfg, median(residuals), median(res_tols), outcome.pass,
        {{"median_gaps", med_gap},
         {"median_distances", med_avg},
         {"monotone", monotone},
         {"drop_ok", drop_ok},
         {"averaged_decreasing", decreasing},
         {"reconstruction_ok", recon_ok},
         {"eigenvalue_study", std::move(eig)}});
    return outcome;
}

}  // namespace driver

/// Samples the declared drift conditions on the standard test cloud before
/// dispatch; catalog entries ship with certified constants, so a failure here
/// means the configuration contradicts its own declaration.
inline void validate_config_drifts(const ExperimentConfig& cfg) {
    for (const auto& [ref, name] :
         {std::pair{&cfg.drift_f, "drift_f"}, std::pair{&cfg.drift_g, "drift_g"}}) {
        const DriftSpec drift = ref->build(cfg.dim);
        const DriftCheckReport check = validate_drift(drift, cfg.dim, 2.0, 500, {7, 7});
        if (!check.growth_ok || !check.dissipativity_ok)
            throw ConfigError(name, "drift violates its declared growth/dissipativity bounds");
    }
}

/// Runs the configured experiment, writing artifacts through the collector.
inline RunOutcome run_to(ArtifactWriter& out, const ExperimentConfig& cfg) {
    validate_config_drifts(cfg);
    if (cfg.experiment == "generate-fbm") return driver::generate_fbm(out, cfg);
    if (cfg.experiment == "fou") return driver::fou_experiment(out, cfg);
    if (cfg.experiment == "equivalence") return driver::equivalence(out, cfg);
    if (cfg.experiment == "contraction") return driver::contraction(out, cfg);
    if (cfg.experiment == "pullback") return driver::pullback(out, cfg);
    if (cfg.experiment == "sync-sweep") return driver::sync_sweep(out, cfg);
    if (cfg.experiment == "averaged-sweep") return driver::averaged_sweep(out, cfg);
    if (cfg.experiment == "case-multiplicative") return driver::case_multiplicative(out, cfg);
    if (cfg.experiment == "case-mixed") return driver::case_mixed(out, cfg);
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
}

/// Runs an experiment into cfg.out_dir; exit code 0 iff every verdict passed.
/// Artifacts (including the verdict) are written even on failure.
inline int run_experiment(const ExperimentConfig& cfg) {
    ArtifactWriter writer(cfg.out_dir);
    RunOutcome outcome = run_to(writer, cfg);
    writer.write("verdict.json", outcome.verdict.dump(2) + "\n");
    writer.finalize();
    return outcome.pass ? 0 : 1;
}

}  // namespace fracsync
