#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fracsync/grid.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

/// A d-dimensional path sampled on a uniform time lattice.
class SamplePath {
public:
    explicit SamplePath(TimeGrid grid, std::size_t dim = 1)
        : grid_(grid), dim_(dim), data_(grid.points() * dim, 0.0) {
        if (dim == 0) throw Error("path dimension must be positive");
    }

    static SamplePath from_scalar(TimeGrid grid, Vec values) {
        if (values.size() != grid.points())
            throw InvalidGrid("value count does not match grid point count");
        SamplePath p(grid, 1);
        p.data_ = std::move(values);
        return p;
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t points() const noexcept { return grid_.points(); }

    double at(std::size_t i, std::size_t c = 0) const { return data_[i * dim_ + c]; }
    double& at(std::size_t i, std::size_t c = 0) { return data_[i * dim_ + c]; }

    const double* row(std::size_t i) const { return data_.data() + i * dim_; }
    double* row(std::size_t i) { return data_.data() + i * dim_; }

    Vec value(std::size_t i) const { return Vec(row(i), row(i) + dim_); }
    void set_value(std::size_t i, const Vec& v) {
        for (std::size_t c = 0; c < dim_; ++c) at(i, c) = v[c];
    }

    const Vec& data() const noexcept { return data_; }
    Vec& data() noexcept { return data_; }

    std::map<std::string, double>& metadata() noexcept { return metadata_; }
    const std::map<std::string, double>& metadata() const noexcept { return metadata_; }

private:
    TimeGrid grid_;
    std::size_t dim_;
    Vec data_;
    std::map<std::string, double> metadata_;
};

/// Keeps every k-th point. k must divide the step count.
inline SamplePath stride(const SamplePath& p, std::size_t k) {
    if (k == 0 || p.grid().steps() % k != 0)
        throw InvalidGrid("stride must divide the step count");
    if (k == 1) return p;
    SamplePath out(p.grid().coarsened(k), p.dim());
    for (std::size_t i = 0; i < out.points(); ++i)
        for (std::size_t c = 0; c < p.dim(); ++c) out.at(i, c) = p.at(i * k, c);
    out.metadata() = p.metadata();
    return out;
}

/// Index of the window start on the path lattice. The window must share the
/// path spacing, be lattice-aligned and fully covered.
inline std::size_t window_start_index(const SamplePath& p, const TimeGrid& window) {
    if (!p.grid().same_spacing(window))
        throw GridMismatch("window spacing differs from path spacing");
    const auto start = p.grid().index_of(window.t0());
    if (!start) throw GridMismatch("window start is not on the path lattice");
    if (*start + window.steps() > p.grid().steps())
        throw GridMismatch("window extends beyond the path support");
    return *start;
}

inline SamplePath restrict_to(const SamplePath& p, const TimeGrid& window) {
    const std::size_t i0 = window_start_index(p, window);
    SamplePath out(window, p.dim());
    for (std::size_t i = 0; i < out.points(); ++i)
        for (std::size_t c = 0; c < p.dim(); ++c) out.at(i, c) = p.at(i0 + i, c);
    out.metadata() = p.metadata();
    return out;
}

/// Relabels the time axis by dt; values are untouched.
inline SamplePath translate(const SamplePath& p, double dt) {
    SamplePath out(TimeGrid(p.grid().t0() + dt, p.grid().t1() + dt, p.grid().steps()), p.dim());
    out.data() = p.data();
    out.metadata() = p.metadata();
    return out;
}

}  // namespace fracsync
