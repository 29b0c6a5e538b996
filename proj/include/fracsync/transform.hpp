#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fracsync/drift.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/path.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/types.hpp"
#include "fracsync/young.hpp"

namespace fracsync {

/// Coefficients of the linear noise term (a X + b) dB with scalar a != 0.
struct LinearNoiseCoeffs {
    double a;
    Vec b;

    LinearNoiseCoeffs(double a_, Vec b_) : a(a_), b(std::move(b_)) {
        if (a == 0.0) throw Error("linear noise coefficient a must be nonzero");
        if (b.empty()) throw Error("b must have at least one component");
    }

    std::size_t dim() const noexcept { return b.size(); }
    Vec b_over_a() const {
        Vec r(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] / a;
        return r;
    }
};

/// U = exp(-a o) (x + b/a) - b/a.
inline Vec forward_transform(const Vec& x, double o, const LinearNoiseCoeffs& coeffs) {
    const double em = std::exp(-coeffs.a * o);
    Vec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double boa = coeffs.b[i] / coeffs.a;
        u[i] = em * (x[i] + boa) - boa;
    }
    return u;
}

/// X = exp(a o) (u + b/a) - b/a; exact mutual inverse of forward_transform.
inline Vec inverse_transform(const Vec& u, double o, const LinearNoiseCoeffs& coeffs) {
    const double ep = std::exp(coeffs.a * o);
    Vec x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double boa = coeffs.b[i] / coeffs.a;
        x[i] = ep * (u[i] + boa) - boa;
    }
    return x;
}

/// Vector field of the transformed pathwise equation:
///   F(u, o) = exp(-a o) f(u exp(a o) + (b/a)(exp(a o) - 1)) + (a u + b) o.
inline void rde_vector_field(const Vec& u, double o, const LinearNoiseCoeffs& coeffs,
                             const DriftSpec& drift, Vec& arg, Vec& out) {
    const double ep = std::exp(coeffs.a * o);
    const double em = 1.0 / ep;
    const double epm1 = std::expm1(coeffs.a * o);
    for (std::size_t i = 0; i < u.size(); ++i)
        arg[i] = u[i] * ep + (coeffs.b[i] / coeffs.a) * epm1;
    drift.apply(arg, out);
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = em * out[i] + (coeffs.a * u[i] + coeffs.b[i]) * o;
}

inline Vec rde_vector_field(const Vec& u, double o, const LinearNoiseCoeffs& coeffs,
                            const DriftSpec& drift) {
    Vec arg(u.size()), out(u.size());
    rde_vector_field(u, o, coeffs, drift, arg, out);
    return out;
}

struct ChainRuleReport {
    std::vector<std::size_t> strides;  // coarse -> fine
    Vec defects;                       // sup defect of the integral identity per stride
    double finest_defect = 0.0;
    double decay_order = 0.0;  // fitted order of defect vs lattice spacing
};

/// Evaluates the integral identity U_t - U_0 = int F(U_s, O_s) ds on the
/// lattice of the supplied solution path and reports how the sup defect
/// decays as the evaluation lattice refines toward full resolution.
inline ChainRuleReport chain_rule_residual(const SamplePath& x_path, const SamplePath& o_path,
                                           const LinearNoiseCoeffs& coeffs,
                                           const DriftSpec& drift) {
    if (!(x_path.grid() == o_path.grid()))
        throw GridMismatch("solution and noise-coordinate paths must share a lattice");
    const std::size_t n = x_path.grid().steps();
    const double h = x_path.grid().spacing();
    const std::size_t d = x_path.dim();

    std::vector<Vec> u(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        u[i] = forward_transform(x_path.value(i), o_path.at(i), coeffs);

    ChainRuleReport report;
    Vec log_h, log_defect;
    for (std::size_t str : {std::size_t{4}, std::size_t{2}, std::size_t{1}}) {
        if (n % str != 0 || n / str < 2) continue;
        Vec running = u[0], field(d), arg(d);
        double defect = 0.0;
        for (std::size_t k = 0; k < n; k += str) {
            rde_vector_field(u[k], o_path.at(k), coeffs, drift, arg, field);
            for (std::size_t c = 0; c < d; ++c)
                running[c] += field[c] * (static_cast<double>(str) * h);
            defect = std::max(defect, distance(running, u[k + str]));
        }
        report.strides.push_back(str);
        report.defects.push_back(defect);
        if (defect > 0.0) {
            log_h.push_back(std::log(static_cast<double>(str) * h));
            log_defect.push_back(std::log(defect));
        }
    }
    if (report.defects.empty()) throw InvalidGrid("path too short for the residual study");
    report.finest_defect = report.defects.back();
    if (log_h.size() >= 2) report.decay_order = linear_fit(log_h, log_defect).slope;
    return report;
}

struct EquivalenceReport {
    Vec sup_distances;            // per level, base resolution first
    double envelope = 0.0;        // Richardson error envelope from both routes
    double ratio = 0.0;           // sup_distances[0] / envelope
    double refinement_order = 0.0;
    bool pass = false;            // ratio <= 3
};

/// Solves the SDE directly (Young-Euler) and through the transformed
/// pathwise equation (Euler on the transformed field, mapped back), from the
/// same noise realization, and compares the trajectories. Both routes are
/// repeated on dyadically coarsened lattices; the tolerance is the Richardson
/// error envelope implied by the h-vs-h/2 self-gaps of the two routes at the
/// certified order 2 alpha - 1.
///
/// The noise must be sampled at spacing window.spacing() / 2^{levels-1} and
/// must cover the window plus the fOU tail.
inline EquivalenceReport equivalence_harness(const DriftSpec& drift,
                                             const LinearNoiseCoeffs& coeffs,
                                             const SamplePath& noise, const Vec& x0,
                                             const TimeGrid& window, double alpha = 0.7,
                                             std::size_t levels = 2,
                                             const FouConfig& fou_cfg = {}) {
    if (levels < 2) throw Error("equivalence harness needs at least two levels");
    const std::size_t d = x0.size();
    std::vector<SamplePath> direct;   // per level
    std::vector<SamplePath> mapped;   // per level
    EquivalenceReport report;

    for (std::size_t level = 0; level < levels; ++level) {
        const std::size_t noise_stride = std::size_t{1} << (levels - 1 - level);
        const SamplePath noise_l = stride(noise, noise_stride);
        const TimeGrid window_l(window.t0(), window.t1(), window.steps() << level);
        if (!noise_l.grid().same_spacing(window_l))
            throw GridMismatch("noise resolution must be window spacing / 2^(levels-1)");
        const SamplePath fou = fou_stationary(noise_l, window_l, fou_cfg);

        SamplePath x_direct = young_euler_sde(drift, coeffs.a, coeffs.b, noise_l, x0, window_l);

        SamplePath x_mapped(window_l, d);
        Vec u = forward_transform(x0, fou.at(0), coeffs);
        Vec field(d), arg(d);
        const double h = window_l.spacing();
        x_mapped.set_value(0, inverse_transform(u, fou.at(0), coeffs));
        for (std::size_t k = 0; k < window_l.steps(); ++k) {
            rde_vector_field(u, fou.at(k), coeffs, drift, arg, field);
            for (std::size_t c = 0; c < d; ++c) {
                u[c] += h * field[c];
                if (std::abs(u[c]) > 1e12)
                    throw StepExplosion("transformed trajectory exceeded 1e12");
            }
            x_mapped.set_value(k + 1, inverse_transform(u, fou.at(k + 1), coeffs));
        }

        double dist = 0.0;
        for (std::size_t i = 0; i <= window_l.steps(); ++i)
            dist = std::max(dist, distance(x_direct.value(i), x_mapped.value(i)));
        report.sup_distances.push_back(dist);
        direct.push_back(std::move(x_direct));
        mapped.push_back(std::move(x_mapped));
    }

    // Self-refinement gaps of each route between the base level and the next,
    // evaluated on the base lattice.
    auto self_gap = [&](const std::vector<SamplePath>& route) {
        const SamplePath& coarse = route[0];
        const SamplePath& fine = route[1];
        double g = 0.0;
        for (std::size_t i = 0; i < coarse.points(); ++i)
            g = std::max(g, distance(coarse.value(i), fine.value(2 * i)));
        return g;
    };
    const double order = 2.0 * alpha - 1.0;
    const double gap_sum = self_gap(direct) + self_gap(mapped);
    report.envelope = gap_sum / (1.0 - std::pow(2.0, -order));
    report.ratio = report.envelope > 0.0
                       ? report.sup_distances.front() / report.envelope
                       : (report.sup_distances.front() == 0.0 ? 0.0 : HUGE_VAL);
    report.pass = report.ratio <= 3.0;
    if (levels >= 2 && report.sup_distances[1] > 0.0)
        report.refinement_order =
            std::log2(report.sup_distances[0] / report.sup_distances[1]);
    return report;
}

}  // namespace fracsync
