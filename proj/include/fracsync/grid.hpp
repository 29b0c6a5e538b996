#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "fracsync/types.hpp"

namespace fracsync {

/// Uniform lattice on [t0, t1] with `steps` panels (steps + 1 points).
class TimeGrid {
public:
    TimeGrid(double t0, double t1, std::size_t steps) : t0_(t0), t1_(t1), steps_(steps) {
        if (!std::isfinite(t0) || !std::isfinite(t1))
            throw InvalidGrid("grid endpoints must be finite");
        if (!(t0 < t1)) throw InvalidGrid("grid requires t0 < t1");
        if (steps < 1) throw InvalidGrid("grid requires at least one step");
    }

    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t points() const noexcept { return steps_ + 1; }
    double spacing() const noexcept { return (t1_ - t0_) / static_cast<double>(steps_); }
    double length() const noexcept { return t1_ - t0_; }

    double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * spacing(); }

    /// Absolute tolerance used for lattice alignment checks.
    double tolerance() const noexcept {
        return 1e-9 * std::max({1.0, std::abs(t0_), std::abs(t1_)});
    }

    /// Index of a time on the lattice, or nullopt if off-lattice / out of range.
    std::optional<std::size_t> index_of(double t) const noexcept {
        const double x = (t - t0_) / spacing();
        const double r = std::round(x);
        if (r < -0.5 || r > static_cast<double>(steps_) + 0.5) return std::nullopt;
        const auto i = static_cast<std::size_t>(r);
        if (i > steps_) return std::nullopt;
        if (std::abs(time(i) - t) > tolerance()) return std::nullopt;
        return i;
    }

    /// True when t = 0 lies on the (possibly extended) lattice.
    bool origin_aligned() const noexcept {
        const double k = -t0_ / spacing();
        return std::abs(k - std::round(k)) * spacing() <= tolerance();
    }

    std::optional<std::size_t> origin_index() const noexcept { return index_of(0.0); }

    bool same_spacing(const TimeGrid& other) const noexcept {
        const double h = spacing();
        return std::abs(h - other.spacing()) <= 1e-12 * std::max(h, other.spacing());
    }

    TimeGrid refined(std::size_t factor) const { return TimeGrid(t0_, t1_, steps_ * factor); }

    TimeGrid coarsened(std::size_t factor) const {
        if (factor == 0 || steps_ % factor != 0)
            throw InvalidGrid("coarsening factor must divide the step count");
        return TimeGrid(t0_, t1_, steps_ / factor);
    }

    bool operator==(const TimeGrid& o) const noexcept {
        return t0_ == o.t0_ && t1_ == o.t1_ && steps_ == o.steps_;
    }

private:
    double t0_;
    double t1_;
    std::size_t steps_;
};

}  // namespace fracsync
