#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fracsync/drift.hpp"
#include "fracsync/path.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

struct Partition {
    std::vector<double> points;

    static Partition from_grid(const TimeGrid& g) {
        Partition p;
        p.points.reserve(g.points());
        for (std::size_t i = 0; i < g.points(); ++i) p.points.push_back(g.time(i));
        return p;
    }

    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            m = std::max(m, points[i] - points[i - 1]);
        return m;
    }
};

struct YoungResult {
    Vec value;                    // left-point sum at the finest lattice
    double refinement_gap = 0.0;  // |S_fine - S_half|
    double alpha_beta_margin = 0.0;
    double error_estimate = 0.0;  // gap / (2^margin - 1), Richardson scaling
};

namespace detail {

inline Vec left_point_sum(const SamplePath& integrand, std::size_t y0, const SamplePath& integrator,
                          std::size_t x0, std::size_t steps, std::size_t str) {
    Vec sum(integrand.dim(), 0.0);
    std::size_t k = 0;
    while (k < steps) {
        const std::size_t next = std::min(k + str, steps);
        const double dx = integrator.at(x0 + next) - integrator.at(x0 + k);
        for (std::size_t c = 0; c < integrand.dim(); ++c) sum[c] += integrand.at(y0 + k, c) * dx;
        k = next;
    }
    return sum;
}

}  // namespace detail

/// Left-point Riemann-Stieltjes sum of integrand dIntegrator over the window,
/// with the half-resolution gap as an error surrogate. Valid when the Hoelder
/// exponents satisfy alpha + beta > 1.
inline YoungResult young_integral(const SamplePath& integrand, const SamplePath& integrator,
                                  const TimeGrid& window, double alpha, double beta) {
    if (!(alpha + beta > 1.0))
        throw RegularityViolation("Young integration requires alpha + beta > 1");
    if (integrator.dim() != 1) throw Error("integrator path must be scalar");
    const std::size_t y0 = window_start_index(integrand, window);
    const std::size_t x0 = window_start_index(integrator, window);
    const std::size_t n = window.steps();

    YoungResult result;
    result.value = detail::left_point_sum(integrand, y0, integrator, x0, n, 1);
    const Vec coarse = detail::left_point_sum(integrand, y0, integrator, x0, n, 2);
    double gap2 = 0.0;
    for (std::size_t c = 0; c < result.value.size(); ++c) {
        const double d = result.value[c] - coarse[c];
        gap2 += d * d;
    }
    result.refinement_gap = std::sqrt(gap2);
    result.alpha_beta_margin = alpha + beta - 1.0;
    result.error_estimate =
        result.refinement_gap / (std::pow(2.0, result.alpha_beta_margin) - 1.0);
    return result;
}

/// Explicit Young-Euler step for dX = f(X) dt + (a X + b) dB:
///   X_{k+1} = X_k + f(X_k) h + (a X_k + b) (B_{k+1} - B_k).
inline SamplePath young_euler_sde(const DriftSpec& drift, double a, const Vec& b,
                                  const SamplePath& noise, const Vec& x0,
                                  const TimeGrid& window) {
    if (noise.dim() != 1) throw Error("noise path must be scalar");
    if (x0.size() != b.size()) throw Error("x0 and b must share a dimension");
    const std::size_t n0 = window_start_index(noise, window);
    const double h = window.spacing();
    const std::size_t d = x0.size();

    SamplePath out(window, d);
    Vec x = x0, fx(d);
    out.set_value(0, x);
    for (std::size_t k = 0; k < window.steps(); ++k) {
        const double db = noise.at(n0 + k + 1) - noise.at(n0 + k);
        drift.apply(x, fx);
        for (std::size_t c = 0; c < d; ++c) {
            x[c] += fx[c] * h + (a * x[c] + b[c]) * db;
            if (std::abs(x[c]) > 1e12)
                throw StepExplosion("trajectory exceeded 1e12 at t = " +
                                    std::to_string(window.time(k + 1)));
        }
        out.set_value(k + 1, x);
    }
    return out;
}

}  // namespace fracsync
