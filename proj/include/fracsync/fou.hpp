#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fracsync/path.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

struct FouConfig {
    double nu = 1.0;            // mean-reversion rate
    double tail_length = 20.0;  // how far before the window the noise must reach

    void validate() const {
        if (!(nu > 0.0)) throw Error("fOU rate nu must be positive");
        if (!(tail_length > 0.0)) throw Error("fOU tail length must be positive");
    }
};

namespace detail {

// nu * integral_{t_a}^{t_j} exp(-nu (t_j - s)) B_s ds for every lattice point,
// by the exponentially weighted trapezoid recursion. Exact composite
// trapezoid of the kernel-weighted integrand.
inline Vec weighted_tail_integral(const SamplePath& noise, std::size_t start, double nu) {
    const double h = noise.grid().spacing();
    const double decay = std::exp(-nu * h);
    const double w_prev = nu * 0.5 * h * decay;
    const double w_curr = nu * 0.5 * h;
    Vec J(noise.points() - start, 0.0);
    for (std::size_t j = start + 1; j < noise.points(); ++j)
        J[j - start] = decay * J[j - start - 1] + w_prev * noise.at(j - 1) + w_curr * noise.at(j);
    return J;
}

inline void require_scalar(const SamplePath& noise) {
    if (noise.dim() != 1) throw Error("fOU construction expects a scalar noise path");
}

}  // namespace detail

/// Stationary fractional Ornstein-Uhlenbeck path on `window`, driven by the
/// given fBm path. The stochastic convolution is evaluated through the
/// integration-by-parts identity O_t = B_t - nu * int exp(-nu(t-s)) B_s ds,
/// truncated at the start of the noise support.
inline SamplePath fou_stationary(const SamplePath& noise, const TimeGrid& window,
                                 const FouConfig& cfg = {}) {
    cfg.validate();
    detail::require_scalar(noise);
    const std::size_t w0 = window_start_index(noise, window);
    const double support_before = window.t0() - noise.grid().t0();
    if (support_before + window.tolerance() < cfg.tail_length)
        throw InsufficientSupport("noise must extend tail_length before the window");

    const Vec J = detail::weighted_tail_integral(noise, 0, cfg.nu);
    SamplePath out(window, 1);
    for (std::size_t i = 0; i <= window.steps(); ++i)
        out.at(i) = noise.at(w0 + i) - J[w0 + i];
    out.metadata()["quadrature_step"] = noise.grid().spacing();
    out.metadata()["truncation_bound"] = std::exp(-cfg.nu * support_before);
    return out;
}

/// Stationary fOU on the largest window the noise supports.
inline SamplePath fou_stationary(const SamplePath& noise, const FouConfig& cfg = {}) {
    cfg.validate();
    const TimeGrid& g = noise.grid();
    const auto start =
        static_cast<std::size_t>(std::ceil(cfg.tail_length / g.spacing() - 1e-9));
    if (start >= g.steps())
        throw InsufficientSupport("noise must extend tail_length before the window");
    return fou_stationary(noise, TimeGrid(g.time(start), g.t1(), g.steps() - start), cfg);
}

/// Initial-value fOU: O_t = exp(-nu (t - t_start)) x0 + stochastic part from
/// t_start. Converges pathwise to the stationary solution as t grows.
inline SamplePath fou_ivp(const SamplePath& noise, double x0, double t_start,
                          const TimeGrid& window, const FouConfig& cfg = {}) {
    cfg.validate();
    detail::require_scalar(noise);
    const auto s = noise.grid().index_of(t_start);
    if (!s) throw InsufficientSupport("t_start is not on the noise lattice");
    if (window.t0() + window.tolerance() < t_start)
        throw InsufficientSupport("window starts before t_start");
    const std::size_t w0 = window_start_index(noise, window);

    const Vec J = detail::weighted_tail_integral(noise, *s, cfg.nu);
    SamplePath out(window, 1);
    const double b_start = noise.at(*s);
    for (std::size_t i = 0; i <= window.steps(); ++i) {
        const std::size_t j = w0 + i;
        const double decay = std::exp(-cfg.nu * (noise.grid().time(j) - t_start));
        out.at(i) = decay * (x0 - b_start) + noise.at(j) - J[j - *s];
    }
    out.metadata()["quadrature_step"] = noise.grid().spacing();
    return out;
}

inline SamplePath fou_ivp(const SamplePath& noise, double x0, double t_start,
                          const FouConfig& cfg = {}) {
    const auto s = noise.grid().index_of(t_start);
    if (!s || *s >= noise.grid().steps())
        throw InsufficientSupport("t_start is not on the noise lattice");
    return fou_ivp(noise, x0, t_start,
                   TimeGrid(t_start, noise.grid().t1(), noise.grid().steps() - *s), cfg);
}

/// Trapezoid time average (1/T) int_0^T O_s ds.
inline double ergodic_average(const SamplePath& fou, double T) {
    if (!(T > 0)) throw Error("ergodic average needs T > 0");
    const auto i0 = fou.grid().index_of(0.0);
    const auto i1 = fou.grid().index_of(T);
    if (!i0 || !i1) throw InvalidGrid("[0, T] must lie on the path lattice");
    const double h = fou.grid().spacing();
    double acc = 0.0;
    for (std::size_t i = *i0; i < *i1; ++i) acc += 0.5 * h * (fou.at(i) + fou.at(i + 1));
    return acc / T;
}

struct SublinearReport {
    Vec times;       // dyadic probe times
    Vec scaled;      // |t|^{-delta} |O_t|
    double trend_slope = 0.0;
    bool violation = false;  // eventual decrease not observed
};

/// Probes |t|^{-delta} |O_t| at dyadic times; a nonnegative fitted trend in
/// the log-log plane flags a violation of the expected decay.
inline SublinearReport sublinear_growth_check(const SamplePath& fou, double delta) {
    if (!(delta > 0)) throw Error("delta must be positive");
    SublinearReport report;
    Vec lx, ly;
    auto probe = [&](double t) {
        const auto idx = fou.grid().index_of(t);
        if (!idx) return;
        const double v = std::abs(fou.at(*idx)) * std::pow(std::abs(t), -delta);
        report.times.push_back(t);
        report.scaled.push_back(v);
        if (v > 0.0) {
            lx.push_back(std::log(std::abs(t)));
            ly.push_back(std::log(v));
        }
    };
    for (double t = 1.0; t <= fou.grid().t1(); t *= 2.0) probe(t);
    for (double t = -1.0; t >= fou.grid().t0(); t *= 2.0) probe(t);
    if (lx.size() >= 2) {
        report.trend_slope = linear_fit(lx, ly).slope;
        report.violation = report.trend_slope >= 0.0;
    }
    return report;
}

}  // namespace fracsync
