#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fracsync/path.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

struct HolderEstimate {
    double exponent = 0.0;
    // (lag, mean squared increment) pairs used for the fit.
    std::vector<std::pair<double, double>> variogram;
};

/// Variogram estimator: regress log of the mean squared increment on the log
/// lag over dyadic lags; half the slope estimates the Hoelder/scaling
/// exponent of the path.
inline HolderEstimate estimate_holder_exponent(const SamplePath& path) {
    const std::size_t n = path.grid().steps();
    if (n < 64) throw InvalidGrid("exponent estimation needs at least 64 steps");
    const double h = path.grid().spacing();

    HolderEstimate est;
    Vec log_lag, log_var;
    // long lags carry few effective samples and bias the log fit downward
    const std::size_t max_lag = std::max<std::size_t>(n / 64, 8);
    for (std::size_t k = 1; k <= max_lag; k *= 2) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k <= n; ++i) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < path.dim(); ++c) {
                const double d = path.at(i + k, c) - path.at(i, c);
                d2 += d * d;
            }
            acc += d2;
        }
        const double m = acc / static_cast<double>(n - k + 1);
        est.variogram.emplace_back(static_cast<double>(k) * h, m);
        if (m > 0.0) {
            log_lag.push_back(std::log(static_cast<double>(k) * h));
            log_var.push_back(std::log(m));
        }
    }
    if (log_lag.size() < 2)
        throw DegeneratePath("path has no increment variation; exponent undefined");
    est.exponent = 0.5 * linear_fit(log_lag, log_var).slope;
    return est;
}

/// Discrete Hoelder seminorm sup_{i != j} |u_i - u_j| / |t_i - t_j|^alpha.
inline double holder_seminorm(const SamplePath& path, double alpha) {
    const std::size_t pts = path.points();
    double best = 0.0;
    for (std::size_t i = 0; i < pts; ++i) {
        for (std::size_t j = i + 1; j < pts; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < path.dim(); ++c) {
                const double d = path.at(j, c) - path.at(i, c);
                d2 += d * d;
            }
            const double dt = path.grid().time(j) - path.grid().time(i);
            best = std::max(best, std::sqrt(d2) / std::pow(dt, alpha));
        }
    }
    return best;
}

struct GrowthReport {
    double K = 0.0;       // smallest K with |u(t)| <= K (1 + t^2) on the grid
    double t_at_max = 0.0;
};

inline GrowthReport polynomial_growth_check(const SamplePath& path) {
    GrowthReport report;
    report.t_at_max = path.grid().t0();
    for (std::size_t i = 0; i < path.points(); ++i) {
        double v2 = 0.0;
        for (std::size_t c = 0; c < path.dim(); ++c) v2 += path.at(i, c) * path.at(i, c);
        const double t = path.grid().time(i);
        const double ratio = std::sqrt(v2) / (1.0 + t * t);
        if (ratio > report.K) {
            report.K = ratio;
            report.t_at_max = t;
        }
    }
    return report;
}

}  // namespace fracsync
