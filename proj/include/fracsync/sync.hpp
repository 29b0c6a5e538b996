#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fracsync/drift.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/path.hpp"
#include "fracsync/rde.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/transform.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

/// One sample of the coupled contraction matrix
///   [[-2L - kappa + 2 a1 O1_t, kappa], [kappa, -2L - kappa + 2 a2 O2_t]].
struct ContractionMatrixSample {
    double t = 0.0;
    std::array<double, 4> entries{};  // row-major 2x2
};

struct SyncReport {
    std::vector<std::pair<double, double>> gap_trajectory;  // (t, |U-V|^2)
    double fitted_rate = 0.0;
    double eigenvalue_bound = 0.0;
    double kappa = 0.0;
    double reference_distance = 0.0;
    double steady_gap = 0.0;  // time average of |U-V|^2 over the second half
    bool pass = true;
};

struct AbsorbingRadius {
    double R_squared = 1.0;
    double truncation_T = 0.0;
    double quadrature_step = 0.0;
    double tail_bound = 0.0;  // exp(-L T) factor of the neglected tail
};

namespace detail {

inline double time_averaged_gap(const CoupledTrajectory& traj, std::size_t from) {
    const double h = traj.grid.spacing();
    double acc = 0.0;
    for (std::size_t i = from; i < traj.grid.steps(); ++i)
        acc += 0.5 * h * (traj.gap_sq(i) + traj.gap_sq(i + 1));
    const double span = traj.grid.time(traj.grid.steps()) - traj.grid.time(from);
    return span > 0.0 ? acc / span : traj.gap_sq(from);
}

inline double trapezoid_average(const SamplePath& p, std::size_t i0, std::size_t i1) {
    const double h = p.grid().spacing();
    double acc = 0.0;
    for (std::size_t i = i0; i < i1; ++i) acc += 0.5 * h * (p.at(i) + p.at(i + 1));
    const double span = static_cast<double>(i1 - i0) * h;
    return span > 0.0 ? acc / span : p.at(i0);
}

}  // namespace detail

/// Integrates pairs of initial conditions along the same noise coordinate and
/// fits the decay rate of log |U1 - U2|^2; the rate must not exceed
/// 2(-L + a * mean(O)) + tolerance.
inline SyncReport contraction_test(const DriftSpec& drift, const LinearNoiseCoeffs& coeffs,
                                   const SamplePath& fou,
                                   const std::vector<std::pair<Vec, Vec>>& u0_pairs,
                                   const TimeGrid& window, double tolerance = 0.25) {
    if (u0_pairs.empty()) throw Error("contraction test needs at least one pair");
    const std::size_t f0 = window_start_index(fou, window);

    SyncReport report;
    Vec slopes;
    for (std::size_t pi = 0; pi < u0_pairs.size(); ++pi) {
        const auto& [ua, ub] = u0_pairs[pi];
        const SamplePath t1 = integrate_rde(drift, coeffs, fou, ua, window);
        const SamplePath t2 = integrate_rde(drift, coeffs, fou, ub, window);
        Vec ts, lg;
        for (std::size_t i = 0; i <= window.steps(); ++i) {
            const double g = distance_sq(t1.value(i), t2.value(i));
            if (pi == 0) report.gap_trajectory.emplace_back(window.time(i), g);
            if (g > 1e-280) {
                ts.push_back(window.time(i));
                lg.push_back(std::log(g));
            }
        }
        if (ts.size() >= 2) slopes.push_back(linear_fit(ts, lg).slope);
    }
    if (slopes.empty()) throw DegeneratePath("all pairs coincide; no decay rate to fit");

    const double mean_o = detail::trapezoid_average(fou, f0, f0 + window.steps());
    report.fitted_rate = median(slopes);
    report.eigenvalue_bound = 2.0 * (-drift.dissipativity_L + coeffs.a * mean_o);
    report.pass = report.fitted_rate <= report.eigenvalue_bound + tolerance;
    return report;
}

/// Quadrature of the pullback absorbing radius
///   R^2 = 1 + (2/L) int_{-T}^0 (e^{-2aO} |f((b/a)(e^{aO}-1))|^2 + |b O|^2)
///                      e^{L tau + 2 int_tau^0 a O ds} d tau.
inline AbsorbingRadius absorbing_radius(const DriftSpec& drift, const LinearNoiseCoeffs& coeffs,
                                        const SamplePath& fou, double truncation_T) {
    const auto end = fou.grid().index_of(0.0);
    const auto start = fou.grid().index_of(-truncation_T);
    if (!end || !start || *start > *end)
        throw InsufficientSupport("fOU path must cover [-T, 0] on its lattice");
    const double h = fou.grid().spacing();
    const double L = drift.dissipativity_L;
    const double a = coeffs.a;
    const Vec boa = coeffs.b_over_a();
    const double b2 = norm_sq(coeffs.b);

    // K_j = 2 int_{tau_j}^0 a O ds, accumulated backward.
    const std::size_t count = *end - *start + 1;
    Vec K(count, 0.0);
    for (std::size_t r = 1; r < count; ++r) {
        const std::size_t j = *end - r;
        K[count - 1 - r] = K[count - r] + 2.0 * a * 0.5 * h * (fou.at(j) + fou.at(j + 1));
    }

    Vec arg(coeffs.dim()), fval(coeffs.dim());
    auto integrand = [&](std::size_t offset) {
        const std::size_t j = *start + offset;
        const double o = fou.at(j);
        for (std::size_t c = 0; c < arg.size(); ++c) arg[c] = boa[c] * std::expm1(a * o);
        drift.apply(arg, fval);
        const double tau = fou.grid().time(j);
        const double weight = std::exp(L * tau + K[offset]);
        return (std::exp(-2.0 * a * o) * norm_sq(fval) + b2 * o * o) * weight;
    };

    double I = 0.0;
    double prev = integrand(0);
    for (std::size_t offset = 1; offset < count; ++offset) {
        const double curr = integrand(offset);
        I += 0.5 * h * (prev + curr);
        prev = curr;
    }

    AbsorbingRadius radius;
    radius.R_squared = 1.0 + (2.0 / L) * I;
    radius.truncation_T = truncation_T;
    radius.quadrature_step = h;
    radius.tail_bound = std::exp(-L * truncation_T);
    return radius;
}

struct PullbackReport {
    Vec start_times;
    Vec diameters;           // cloud diameter at t = 0 per start time
    bool strictly_decreasing = false;
    double final_diameter = 0.0;
};

/// Launches a deterministic cloud of initial conditions of norm <= radius0 at
/// each start time, integrates to t = 0 along the same noise coordinate and
/// measures the cloud diameter there.
inline PullbackReport pullback_attractor_estimate(const DriftSpec& drift,
                                                  const LinearNoiseCoeffs& coeffs,
                                                  const SamplePath& fou, Vec start_times,
                                                  double radius0) {
    if (start_times.empty()) throw Error("pullback estimate needs start times");
    const std::size_t d = coeffs.dim();
    std::vector<Vec> cloud;
    cloud.push_back(Vec(d, 0.0));
    for (std::size_t c = 0; c < d; ++c) {
        for (double r : {radius0, -radius0, 0.5 * radius0, -0.5 * radius0}) {
            Vec p(d, 0.0);
            p[c] = r;
            cloud.push_back(p);
        }
    }

    PullbackReport report;
    std::sort(start_times.begin(), start_times.end(), std::greater<>());  // -5 before -20
    const auto origin = fou.grid().index_of(0.0);
    if (!origin) throw InsufficientSupport("fOU path must contain t = 0");
    for (double s : start_times) {
        const auto si = fou.grid().index_of(s);
        if (!si || *si >= *origin)
            throw InsufficientSupport("start time outside the fOU support");
        const TimeGrid window(s, 0.0, *origin - *si);
        std::vector<Vec> finals;
        finals.reserve(cloud.size());
        for (const Vec& p : cloud)
            finals.push_back(integrate_rde(drift, coeffs, fou, p, window).value(window.steps()));
        double diameter = 0.0;
        for (std::size_t i = 0; i < finals.size(); ++i)
            for (std::size_t j = i + 1; j < finals.size(); ++j)
                diameter = std::max(diameter, distance(finals[i], finals[j]));
        report.start_times.push_back(s);
        report.diameters.push_back(diameter);
    }
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.diameters.size(); ++i)
        if (!(report.diameters[i] < report.diameters[i - 1]))
            report.strictly_decreasing = false;
    report.final_diameter = report.diameters.back();
    return report;
}

struct EigenBoundReport {
    Vec times;     // elapsed time from the window start
    Vec eig_max;   // largest eigenvalue of int_0^t A_kappa
    double kappa = 0.0;
    double onset_time = 0.0;  // first time from which eig_max <= -L t holds on
    bool onset_found = false;
    bool bound_holds_after_onset = false;
    // realized gaps vs exp(int_0^t A) m(0)
    double comparison_max_rel_violation = 0.0;
    // realized gaps vs the time-ordered product of per-step exponentials,
    // which tracks the comparison system d y/dt = A(t) y itself; exp(int A)
    // can undershoot that solution when the A(t) do not commute
    double propagator_max_rel_violation = 0.0;
    std::vector<ContractionMatrixSample> matrix_samples;
};

namespace detail {

// exp(M) b for symmetric M = [[p, q], [q, r]], evaluated in a form that
// stays finite for strongly negative spectra.
inline std::pair<double, double> sym2x2_exp_apply(double p, double q, double r, double b0,
                                                  double b1) {
    const double m = 0.5 * (p + r);
    const double delta = 0.5 * (p - r);
    const double s = std::sqrt(delta * delta + q * q);
    const double lead = std::exp(m + s);  // = exp(lambda_max)
    const double cosh_part = 0.5 * (1.0 + std::exp(-2.0 * s));
    const double sinh_part = s > 1e-12 ? -std::expm1(-2.0 * s) / (2.0 * s) : std::exp(-s);
    const double y0 = lead * (cosh_part * b0 + sinh_part * (delta * b0 + q * b1));
    const double y1 = lead * (cosh_part * b1 + sinh_part * (q * b0 - delta * b1));
    return {y0, y1};
}

/// Eigenvalue/comparison study shared by the standard and the mixed-noise
/// coupled systems; a_eff is the multiplicative coefficient entering the
/// matrix diagonal (zero for an additive channel).
inline EigenBoundReport contraction_eigen_bound(double a1_eff, double a2_eff, double L,
                                                double kappa, const SamplePath& fou1,
                                                const SamplePath& fou2, const TimeGrid& window,
                                                const CoupledTrajectory& traj_a,
                                                const CoupledTrajectory& traj_b) {
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t n = window.steps();
    const double h = window.spacing();

    EigenBoundReport report;
    report.kappa = kappa;
    const double m0_u = distance_sq(traj_a.u(0), traj_b.u(0));
    const double m0_v = distance_sq(traj_a.v(0), traj_b.v(0));

    double int_o1 = 0.0, int_o2 = 0.0;
    report.times.reserve(n + 1);
    report.eig_max.reserve(n + 1);
    report.times.push_back(0.0);
    report.eig_max.push_back(0.0);
    double max_rel_violation = 0.0;
    double max_prop_violation = 0.0;
    double prop_u = m0_u, prop_v = m0_v;

    for (std::size_t k = 1; k <= n; ++k) {
        const double o1a = fou1.at(i1 + k - 1), o1b = fou1.at(i1 + k);
        const double o2a = fou2.at(i2 + k - 1), o2b = fou2.at(i2 + k);
        int_o1 += 0.5 * h * (o1a + o1b);
        int_o2 += 0.5 * h * (o2a + o2b);
        const double tau = static_cast<double>(k) * h;
        const double p = -(2.0 * L + kappa) * tau + 2.0 * a1_eff * int_o1;
        const double r = -(2.0 * L + kappa) * tau + 2.0 * a2_eff * int_o2;
        const double q = kappa * tau;

        const double mean = 0.5 * (p + r);
        const double delta = 0.5 * (p - r);
        const double s = std::sqrt(delta * delta + q * q);
        report.times.push_back(tau);
        report.eig_max.push_back(mean + s);

        // one-step exponential of the trapezoid-averaged matrix
        const double ps = h * (-(2.0 * L + kappa) + a1_eff * (o1a + o1b));
        const double rs = h * (-(2.0 * L + kappa) + a2_eff * (o2a + o2b));
        std::tie(prop_u, prop_v) = sym2x2_exp_apply(ps, kappa * h, rs, prop_u, prop_v);

        const auto [bu, bv] = sym2x2_exp_apply(p, q, r, m0_u, m0_v);
        const double mu = distance_sq(traj_a.u(k), traj_b.u(k));
        const double mv = distance_sq(traj_a.v(k), traj_b.v(k));
        max_rel_violation = std::max(max_rel_violation, (mu - bu) / std::max(bu, 1e-280));
        max_rel_violation = std::max(max_rel_violation, (mv - bv) / std::max(bv, 1e-280));
        max_prop_violation =
            std::max(max_prop_violation, (mu - prop_u) / std::max(prop_u, 1e-280));
        max_prop_violation =
            std::max(max_prop_violation, (mv - prop_v) / std::max(prop_v, 1e-280));
    }
    report.comparison_max_rel_violation = max_rel_violation;
    report.propagator_max_rel_violation = max_prop_violation;

    // Empirical onset: the last upward crossing of the -L t bound.
    const double tol = 1e-9;
    std::size_t onset = report.times.size();
    for (std::size_t k = report.times.size(); k-- > 1;) {
        const double bound = -L * report.times[k];
        if (report.eig_max[k] <= bound + tol * std::max(1.0, std::abs(bound)))
            onset = k;
        else
            break;
    }
    if (onset < report.times.size()) {
        report.onset_found = true;
        report.onset_time = report.times[onset];
        report.bound_holds_after_onset = true;
    }

    for (std::size_t k = 1; k <= n; k += std::max<std::size_t>(1, n / 4)) {
        ContractionMatrixSample sample;
        sample.t = window.time(k);
        sample.entries = {-2.0 * L - kappa + 2.0 * a1_eff * fou1.at(i1 + k), kappa, kappa,
                          -2.0 * L - kappa + 2.0 * a2_eff * fou2.at(i2 + k)};
        report.matrix_samples.push_back(sample);
    }
    return report;
}

}  // namespace detail

/// Eigenvalue and comparison study for the coupled system: the largest
/// eigenvalue of int_0^t A_kappa must fall below -L t past an empirical
/// onset time, and the realized squared gaps of two coupled solutions must
/// stay below the matrix-exponential comparison bound.
inline EigenBoundReport coupled_contraction_eigs(const CoupledConfig& cfg, const SamplePath& fou1,
                                                 const SamplePath& fou2, const TimeGrid& window,
                                                 const CoupledState& state_a,
                                                 const CoupledState& state_b) {
    cfg.validate();
    const CoupledTrajectory ta = integrate_coupled(cfg, fou1, fou2, state_a, window);
    const CoupledTrajectory tb = integrate_coupled(cfg, fou1, fou2, state_b, window);
    return detail::contraction_eigen_bound(cfg.coeffs1.a, cfg.coeffs2.a, cfg.dissipativity_L,
                                           cfg.kappa, fou1, fou2, window, ta, tb);
}

struct SweepResult {
    std::vector<SyncReport> reports;  // one per kappa, in input order
    bool monotone = false;            // steady gaps nonincreasing along kappas
    double drop_ratio = 0.0;          // gap(kappa_max) / gap(kappa_min)
    bool pass = false;
};

/// Runs the coupled system from a common initial state for each kappa and
/// records the time-averaged squared gap over the second half of the window.
/// Passes when the gaps are monotone nonincreasing and, for a kappa span of
/// at least 100x, the largest kappa gap is at most a tenth of the smallest.
inline SweepResult sync_gap_sweep(const CoupledConfig& cfg_base, const Vec& kappas,
                                  const SamplePath& fou1, const SamplePath& fou2,
                                  const TimeGrid& window, const CoupledState& state0) {
    if (kappas.empty()) throw Error("gap sweep needs at least one kappa");
    for (std::size_t i = 1; i < kappas.size(); ++i)
        if (!(kappas[i] > kappas[i - 1])) throw Error("kappas must be positive increasing");

    SweepResult result;
    for (double kappa : kappas) {
        const CoupledTrajectory traj =
            integrate_coupled(cfg_base.with_kappa(kappa), fou1, fou2, state0, window);
        SyncReport report;
        report.kappa = kappa;
        for (std::size_t i = 0; i <= window.steps(); ++i)
            report.gap_trajectory.emplace_back(window.time(i), traj.gap_sq(i));
        report.steady_gap = detail::time_averaged_gap(traj, window.steps() / 2);
        result.reports.push_back(std::move(report));
    }

    result.monotone = true;
    for (std::size_t i = 1; i < result.reports.size(); ++i) {
        const double prev = result.reports[i - 1].steady_gap;
        const double curr = result.reports[i].steady_gap;
        if (curr > prev * (1.0 + 1e-12) + 1e-300) result.monotone = false;
    }
    const double g_min = result.reports.front().steady_gap;
    const double g_max = result.reports.back().steady_gap;
    result.drop_ratio = g_min > 0.0 ? g_max / g_min : (g_max > 0.0 ? HUGE_VAL : 0.0);
    bool drop_ok = true;
    if (kappas.back() / kappas.front() >= 100.0) drop_ok = result.drop_ratio <= 0.1;
    result.pass = result.monotone && drop_ok;
    return result;
}

/// For each kappa, the channel average of the coupled solution after burn-in
/// (the first half of the window) is compared in sup norm against the
/// averaged equation started from the same state and protocol; the distance
/// must decrease as kappa grows.
inline SweepResult averaged_limit_sweep(const CoupledConfig& cfg_base, const Vec& kappas,
                                        const SamplePath& fou1, const SamplePath& fou2,
                                        const TimeGrid& window, const CoupledState& state0) {
    if (kappas.empty()) throw Error("averaged sweep needs at least one kappa");
    Vec w0(state0.u.size());
    for (std::size_t c = 0; c < w0.size(); ++c) w0[c] = 0.5 * (state0.u[c] + state0.v[c]);
    const SamplePath w_bar = integrate_averaged(cfg_base, fou1, fou2, w0, window);
    const std::size_t burn = window.steps() / 2;

    SweepResult result;
    for (double kappa : kappas) {
        const CoupledTrajectory traj =
            integrate_coupled(cfg_base.with_kappa(kappa), fou1, fou2, state0, window);
        SyncReport report;
        report.kappa = kappa;
        double dist = 0.0;
        for (std::size_t i = burn; i <= window.steps(); ++i)
            dist = std::max(dist, distance(traj.mid(i), w_bar.value(i)));
        report.reference_distance = dist;
        report.steady_gap = detail::time_averaged_gap(traj, burn);
        result.reports.push_back(std::move(report));
    }
    result.monotone = true;
    // distances at the floating-point floor count as ties, not violations
    for (std::size_t i = 1; i < result.reports.size(); ++i)
        if (!(result.reports[i].reference_distance <
              result.reports[i - 1].reference_distance * (1.0 + 1e-12) + 1e-12))
            result.monotone = false;
    result.drop_ratio = result.reports.front().reference_distance > 0.0
                            ? result.reports.back().reference_distance /
                                  result.reports.front().reference_distance
                            : 0.0;
    result.pass = result.monotone;
    return result;
}

struct CaseReport {
    SweepResult gap_sweep;
    SweepResult averaged_sweep;
    double reconstruction_residual = 0.0;
    double reconstruction_tolerance = 0.0;
    bool pass = false;
};

namespace detail {

/// Sup distance over the second half of the window between the inverse-mapped
/// coupled solution and the inverse-mapped averaged solution, with a
/// triangle-inequality tolerance assembled from the pipeline's own gap and
/// averaged-distance measurements.
template <class InvX, class InvY>
inline void reconstruction_check(const CoupledTrajectory& uv, const SamplePath& w_bar,
                                 InvX&& inv_x, InvY&& inv_y, std::size_t burn,
                                 double sup_factor_x, double sup_factor_y, CaseReport& out) {
    double residual = 0.0;
    double max_gap = 0.0, max_avg = 0.0;
    for (std::size_t i = burn; i < w_bar.points(); ++i) {
        const Vec x = inv_x(uv.u(i), i);
        const Vec y = inv_y(uv.v(i), i);
        const Vec xr = inv_x(w_bar.value(i), i);
        const Vec yr = inv_y(w_bar.value(i), i);
        residual = std::max(residual, std::max(distance(x, xr), distance(y, yr)));
        max_gap = std::max(max_gap, std::sqrt(uv.gap_sq(i)));
        Vec mid(w_bar.dim());
        for (std::size_t c = 0; c < mid.size(); ++c)
            mid[c] = 0.5 * (uv.u(i)[c] + uv.v(i)[c]);
        max_avg = std::max(max_avg, distance(mid, w_bar.value(i)));
    }
    out.reconstruction_residual = residual;
    out.reconstruction_tolerance =
        3.0 * std::max(sup_factor_x, sup_factor_y) * (0.5 * max_gap + max_avg) + 1e-12;
}

}  // namespace detail

/// Pure multiplicative noise case (b1 = b2 = 0): gap sweep, averaged sweep
/// and the trajectory-level reconstruction identity through the inverse
/// transforms.
inline CaseReport case_pure_multiplicative(const CoupledConfig& cfg, const Vec& kappas,
                                           const SamplePath& fou1, const SamplePath& fou2,
                                           const TimeGrid& window, const CoupledState& state0) {
    cfg.validate();
    if (norm(cfg.coeffs1.b) != 0.0 || norm(cfg.coeffs2.b) != 0.0)
        throw Error("pure multiplicative case requires b1 = b2 = 0");

    CaseReport report;
    report.gap_sweep = sync_gap_sweep(cfg, kappas, fou1, fou2, window, state0);
    report.averaged_sweep = averaged_limit_sweep(cfg, kappas, fou1, fou2, window, state0);

    const double kmax = kappas.back();
    const CoupledTrajectory uv =
        integrate_coupled(cfg.with_kappa(kmax), fou1, fou2, state0, window);
    Vec w0(state0.u.size());
    for (std::size_t c = 0; c < w0.size(); ++c) w0[c] = 0.5 * (state0.u[c] + state0.v[c]);
    const SamplePath w_bar = integrate_averaged(cfg, fou1, fou2, w0, window);

    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t burn = window.steps() / 2;
    double sup1 = 0.0, sup2 = 0.0;
    for (std::size_t i = burn; i <= window.steps(); ++i) {
        sup1 = std::max(sup1, std::exp(cfg.coeffs1.a * fou1.at(i1 + i)));
        sup2 = std::max(sup2, std::exp(cfg.coeffs2.a * fou2.at(i2 + i)));
    }
    detail::reconstruction_check(
        uv, w_bar,
        [&](const Vec& u, std::size_t i) { return inverse_transform(u, fou1.at(i1 + i), cfg.coeffs1); },
        [&](const Vec& v, std::size_t i) { return inverse_transform(v, fou2.at(i2 + i), cfg.coeffs2); },
        burn, sup1, sup2, report);
    report.pass = report.gap_sweep.pass && report.averaged_sweep.pass &&
                  report.reconstruction_residual <= report.reconstruction_tolerance;
    return report;
}

/// Mixed-noise configuration: channel 1 multiplicative (a X + b1) dB1,
/// channel 2 additive b2 dB2 with transform V = Y - b2 O2.
struct MixedConfig {
    double a;
    Vec b1;
    Vec b2;
    DriftSpec drift_f;
    DriftSpec drift_g;
    double dissipativity_L = 1.0;

    void validate() const {
        if (a == 0.0) throw Error("mixed case requires a nonzero multiplicative coefficient");
        if (b1.size() != b2.size()) throw Error("channel dimensions differ");
        if (!(dissipativity_L > 0.0)) throw Error("dissipativity constant L must be positive");
    }
};

/// Mixed noise case: the multiplicative channel uses the exponential
/// transform, the additive channel the shift V = Y - b2 O2 with field
/// G(v, o) = g(v + b2 o) + b2 o.
inline CaseReport case_mixed_noise(const MixedConfig& mixed, const Vec& kappas,
                                   const SamplePath& fou1, const SamplePath& fou2,
                                   const TimeGrid& window, const CoupledState& state0) {
    mixed.validate();
    if (kappas.empty()) throw Error("mixed case needs at least one kappa");
    const LinearNoiseCoeffs coeffs1(mixed.a, mixed.b1);
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t d = mixed.b1.size();

    Vec arg_f(d), arg_g(d);
    auto field_f = [&](const Vec& u, std::size_t idx, Vec& out) {
        rde_vector_field(u, fou1.at(i1 + idx), coeffs1, mixed.drift_f, arg_f, out);
    };
    auto field_g = [&](const Vec& v, std::size_t idx, Vec& out) {
        const double o = fou2.at(i2 + idx);
        for (std::size_t c = 0; c < d; ++c) arg_g[c] = v[c] + mixed.b2[c] * o;
        mixed.drift_g.apply(arg_g, out);
        for (std::size_t c = 0; c < d; ++c) out[c] += mixed.b2[c] * o;
    };
    auto field_avg = [&](const Vec& w, std::size_t idx, Vec& out) {
        Vec fu(d);
        field_f(w, idx, fu);
        field_g(w, idx, out);
        for (std::size_t c = 0; c < d; ++c) out[c] = 0.5 * (fu[c] + out[c]);
    };

    CaseReport report;

    // Gap sweep.
    std::vector<CoupledTrajectory> trajs;
    for (double kappa : kappas) {
        trajs.push_back(integrate_coupled_fields(field_f, field_g, state0, window, kappa));
        SyncReport r;
        r.kappa = kappa;
        for (std::size_t i = 0; i <= window.steps(); ++i)
            r.gap_trajectory.emplace_back(window.time(i), trajs.back().gap_sq(i));
        r.steady_gap = detail::time_averaged_gap(trajs.back(), window.steps() / 2);
        report.gap_sweep.reports.push_back(std::move(r));
    }
    report.gap_sweep.monotone = true;
    for (std::size_t i = 1; i < report.gap_sweep.reports.size(); ++i)
        if (report.gap_sweep.reports[i].steady_gap >
            report.gap_sweep.reports[i - 1].steady_gap * (1.0 + 1e-12) + 1e-300)
            report.gap_sweep.monotone = false;
    {
        const double g0 = report.gap_sweep.reports.front().steady_gap;
        const double g1 = report.gap_sweep.reports.back().steady_gap;
        report.gap_sweep.drop_ratio = g0 > 0.0 ? g1 / g0 : (g1 > 0.0 ? HUGE_VAL : 0.0);
        bool drop_ok = true;
        if (kappas.back() / kappas.front() >= 100.0)
            drop_ok = report.gap_sweep.drop_ratio <= 0.1;
        report.gap_sweep.pass = report.gap_sweep.monotone && drop_ok;
    }

    // Averaged sweep against the mean-field equation.
    Vec w0(d);
    for (std::size_t c = 0; c < d; ++c) w0[c] = 0.5 * (state0.u[c] + state0.v[c]);
    SamplePath w_bar(window, d);
    {
        Vec w = w0, k1(d), k2(d), tmp(d);
        w_bar.set_value(0, w);
        for (std::size_t k = 0; k < window.steps(); ++k) {
            detail::explicit_step(field_avg, w, k, window.spacing(), RdeScheme::heun, k1, k2, tmp);
            detail::check_finite(w, window.time(k + 1));
            w_bar.set_value(k + 1, w);
        }
    }
    const std::size_t burn = window.steps() / 2;
    report.averaged_sweep.monotone = true;
    for (std::size_t ki = 0; ki < kappas.size(); ++ki) {
        SyncReport r;
        r.kappa = kappas[ki];
        double dist = 0.0;
        for (std::size_t i = burn; i <= window.steps(); ++i) {
            Vec mid(d);
            for (std::size_t c = 0; c < d; ++c)
                mid[c] = 0.5 * (trajs[ki].u(i)[c] + trajs[ki].v(i)[c]);
            dist = std::max(dist, distance(mid, w_bar.value(i)));
        }
        r.reference_distance = dist;
        if (ki > 0 &&
            !(dist < report.averaged_sweep.reports.back().reference_distance * (1.0 + 1e-12) +
                  1e-12))
            report.averaged_sweep.monotone = false;
        report.averaged_sweep.reports.push_back(std::move(r));
    }
    report.averaged_sweep.pass = report.averaged_sweep.monotone;

    // Reconstruction at the largest kappa: X = e^{aO1}(U + b1/a) - b1/a,
    // Y = V + b2 O2.
    double sup1 = 0.0;
    for (std::size_t i = burn; i <= window.steps(); ++i)
        sup1 = std::max(sup1, std::exp(mixed.a * fou1.at(i1 + i)));
    detail::reconstruction_check(
        trajs.back(), w_bar,
        [&](const Vec& u, std::size_t i) { return inverse_transform(u, fou1.at(i1 + i), coeffs1); },
        [&](const Vec& v, std::size_t i) {
            Vec y(d);
            const double o = fou2.at(i2 + i);
            for (std::size_t c = 0; c < d; ++c) y[c] = v[c] + mixed.b2[c] * o;
            return y;
        },
        burn, sup1, 1.0, report);
    report.pass = report.gap_sweep.pass && report.averaged_sweep.pass &&
                  report.reconstruction_residual <= report.reconstruction_tolerance;
    return report;
}

/// Eigenvalue/comparison study for the mixed-noise coupled system; the
/// additive channel contributes no multiplicative diagonal term.
inline EigenBoundReport mixed_contraction_eigs(const MixedConfig& mixed, double kappa,
                                               const SamplePath& fou1, const SamplePath& fou2,
                                               const TimeGrid& window,
                                               const CoupledState& state_a,
                                               const CoupledState& state_b) {
    mixed.validate();
    const LinearNoiseCoeffs coeffs1(mixed.a, mixed.b1);
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t d = mixed.b1.size();
    Vec arg_f(d), arg_g(d);
    auto field_f = [&](const Vec& u, std::size_t idx, Vec& out) {
        rde_vector_field(u, fou1.at(i1 + idx), coeffs1, mixed.drift_f, arg_f, out);
    };
    auto field_g = [&](const Vec& v, std::size_t idx, Vec& out) {
        const double o = fou2.at(i2 + idx);
        for (std::size_t c = 0; c < d; ++c) arg_g[c] = v[c] + mixed.b2[c] * o;
        mixed.drift_g.apply(arg_g, out);
        for (std::size_t c = 0; c < d; ++c) out[c] += mixed.b2[c] * o;
    };
    const CoupledTrajectory ta =
        integrate_coupled_fields(field_f, field_g, state_a, window, kappa);
    const CoupledTrajectory tb =
        integrate_coupled_fields(field_f, field_g, state_b, window, kappa);
    return detail::contraction_eigen_bound(mixed.a, 0.0, mixed.dissipativity_L, kappa, fou1,
                                           fou2, window, ta, tb);
}

}  // namespace fracsync
