#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "fracsync/detail/fft.hpp"
#include "fracsync/grid.hpp"
#include "fracsync/path.hpp"
#include "fracsync/rng.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

/// Covariance of two-sided fractional Brownian motion pinned at t = 0:
/// (|t|^{2H} + |s|^{2H} - |t-s|^{2H}) / 2.
inline double fbm_covariance(double t, double s, HurstParameter H) {
    const double twoH = 2.0 * H.value();
    return 0.5 * (std::pow(std::abs(t), twoH) + std::pow(std::abs(s), twoH) -
                  std::pow(std::abs(t - s), twoH));
}

/// Exact Gaussian sampler for fBm on a uniform grid.
///
/// Two routes produce the same law:
///  * circulant embedding of the stationary increment sequence, O(n log n);
///    grids that do not start at zero are covered by sampling a one-sided
///    path over [min(t0,0), max(t1,0)] and re-pinning at the origin, which
///    is exact because fBm has stationary increments;
///  * dense Cholesky of the full covariance matrix, used for small grids
///    and for grids whose start is not lattice-aligned with the origin.
///
/// The factorization/eigenvalue plan is built once per (grid, H); sample()
/// is cheap and deterministic in the seed.
class FbmSampler {
public:
    enum class Method { circulant, cholesky };

    /// Point count up to which the dense route is preferred for grids that
    /// do not start at zero.
    static constexpr std::size_t kDensePointLimit = 2048;

    FbmSampler(const TimeGrid& grid, HurstParameter H) : grid_(grid), hurst_(H.value()) {
        const double h = grid.spacing();
        const double k0 = grid.t0() / h;
        const bool aligned = std::abs(k0 - std::round(k0)) * h <= grid.tolerance();
        const bool straddles = grid.t0() < -grid.tolerance() && grid.t1() > grid.tolerance();
        if (straddles && !grid.origin_index())
            throw InvalidGrid("a grid straddling zero must contain t = 0 as a grid point");

        const bool starts_at_zero = std::abs(grid.t0()) <= grid.tolerance();
        bool want_circulant =
            aligned && (starts_at_zero || grid.points() > kDensePointLimit);
        if (want_circulant && !build_circulant()) {
            if (grid.points() > kDensePointLimit)
                throw NonPositiveDefinite("circulant embedding failed on a grid too large for the dense route");
            want_circulant = false;
        }
        if (!want_circulant) {
            build_cholesky();
            method_ = Method::cholesky;
        } else {
            method_ = Method::circulant;
        }
    }

    Method method() const noexcept { return method_; }

    SamplePath sample(RngSeed seed) const {
        return method_ == Method::circulant ? sample_circulant(seed) : sample_cholesky(seed);
    }

private:
    // --- circulant plan ----------------------------------------------------

    // The one-sided cover starts at min(t0, 0); base_ is the cover index of
    // the grid start, origin_ the cover index of t = 0.
    bool build_circulant() {
        const double h = grid_.spacing();
        const double k0 = std::round(grid_.t0() / h);
        base_ = static_cast<std::size_t>(std::max(0.0, k0));
        origin_ = static_cast<std::size_t>(std::max(0.0, -k0));
        const std::size_t cover_steps = std::max(origin_, base_ + grid_.steps());

        const std::size_t npad = detail::next_pow2(cover_steps);
        const std::size_t m = 2 * npad;
        const double twoH = 2.0 * hurst_;
        auto gamma = [&](std::size_t k) {
            const double kk = static_cast<double>(k);
            if (k == 0) return 1.0;
            return 0.5 * (std::pow(kk + 1.0, twoH) - 2.0 * std::pow(kk, twoH) +
                          std::pow(kk - 1.0, twoH));
        };

        std::vector<std::complex<double>> c(m);
        for (std::size_t k = 0; k <= npad; ++k) c[k] = gamma(k);
        for (std::size_t k = 1; k < npad; ++k) c[m - k] = c[k];
        detail::fft_pow2(c);

        double max_eig = 0.0;
        for (const auto& z : c) max_eig = std::max(max_eig, z.real());
        const double floor = -1e-8 * std::max(1.0, max_eig);
        eigen_sqrt_.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double lambda = c[k].real();
            if (lambda < floor) return false;
            eigen_sqrt_[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(m));
        }
        cover_steps_ = cover_steps;
        return true;
    }

    SamplePath sample_circulant(RngSeed seed) const {
        CounterRng rng(seed);
        const std::size_t m = eigen_sqrt_.size();
        const std::size_t half = m / 2;
        std::vector<std::complex<double>> a(m);
        a[0] = eigen_sqrt_[0] * rng.normal();
        const double inv_sqrt2 = std::sqrt(0.5);
        for (std::size_t k = 1; k < half; ++k) {
            const double re = rng.normal();
            const double im = rng.normal();
            a[k] = eigen_sqrt_[k] * inv_sqrt2 * std::complex<double>(re, im);
            a[m - k] = std::conj(a[k]);
        }
        a[half] = eigen_sqrt_[half] * rng.normal();
        detail::fft_pow2(a);

        // Unit-lag increments scaled to the grid spacing by self-similarity.
        const double scale = std::pow(grid_.spacing(), hurst_);
        std::vector<double> cover(cover_steps_ + 1, 0.0);
        for (std::size_t j = 0; j < cover_steps_; ++j)
            cover[j + 1] = cover[j] + scale * a[j].real();

        SamplePath out(grid_, 1);
        const double pin = cover[origin_];
        for (std::size_t i = 0; i <= grid_.steps(); ++i) out.at(i) = cover[base_ + i] - pin;
        if (auto oi = grid_.origin_index()) out.at(*oi) = 0.0;
        return out;
    }

    // --- dense plan ---------------------------------------------------------

    void build_cholesky() {
        pinned_ = grid_.origin_index();
        free_idx_.clear();
        for (std::size_t i = 0; i < grid_.points(); ++i)
            if (!pinned_ || *pinned_ != i) free_idx_.push_back(i);

        const std::size_t n = free_idx_.size();
        const HurstParameter H(hurst_);
        chol_.assign(n * n, 0.0);
        double max_diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ti = grid_.time(free_idx_[i]);
            for (std::size_t j = 0; j <= i; ++j)
                chol_[i * n + j] = fbm_covariance(ti, grid_.time(free_idx_[j]), H);
            max_diag = std::max(max_diag, chol_[i * n + i]);
        }

        const double tol = 1e-8 * std::max(1.0, max_diag);
        for (std::size_t j = 0; j < n; ++j) {
            double* lj = chol_.data() + j * n;
            double s = lj[j];
            for (std::size_t k = 0; k < j; ++k) s -= lj[k] * lj[k];
            if (s < -tol)
                throw NonPositiveDefinite("covariance matrix failed Cholesky factorization");
            lj[j] = std::sqrt(std::max(s, 0.0));
            for (std::size_t i = j + 1; i < n; ++i) {
                double* li = chol_.data() + i * n;
                double v = li[j];
                for (std::size_t k = 0; k < j; ++k) v -= li[k] * lj[k];
                li[j] = lj[j] > 0.0 ? v / lj[j] : 0.0;
            }
        }
    }

    SamplePath sample_cholesky(RngSeed seed) const {
        CounterRng rng(seed);
        const std::size_t n = free_idx_.size();
        std::vector<double> z(n);
        for (auto& x : z) x = rng.normal();
        SamplePath out(grid_, 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double* li = chol_.data() + i * n;
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += li[k] * z[k];
            out.at(free_idx_[i]) = s;
        }
        if (pinned_) out.at(*pinned_) = 0.0;
        return out;
    }

    TimeGrid grid_;
    double hurst_;
    Method method_ = Method::cholesky;
    // circulant plan
    std::size_t cover_steps_ = 0;
    std::size_t base_ = 0;
    std::size_t origin_ = 0;
    std::vector<double> eigen_sqrt_;
    // dense plan
    std::vector<double> chol_;
    std::vector<std::size_t> free_idx_;
    std::optional<std::size_t> pinned_;
};

inline SamplePath sample_fbm(const TimeGrid& grid, HurstParameter H, RngSeed seed) {
    return FbmSampler(grid, H).sample(seed);
}

/// Wiener shift: (theta_tau w)(s) = w(s + tau) - w(tau) on the overlap of the
/// original and shifted windows. The result vanishes at its own origin.
inline SamplePath wiener_shift(const SamplePath& path, double tau) {
    const TimeGrid& g = path.grid();
    const double h = g.spacing();
    if (std::abs(tau) <= g.tolerance()) return path;
    const double kf = tau / h;
    const double kr = std::round(kf);
    if (std::abs(kf - kr) * h > g.tolerance())
        throw OutOfWindow("shift must be an integer multiple of the grid spacing");
    const auto offset = static_cast<long long>(kr);
    const auto n = static_cast<long long>(g.steps());
    if (std::llabs(offset) >= n)
        throw OutOfWindow("shift leaves no overlap with the path support");
    const auto ref = g.index_of(tau);
    if (!ref) throw OutOfWindow("shift reference time is outside the path support");

    const double r0 = std::max(g.t0(), g.t0() - tau);
    const double r1 = std::min(g.t1(), g.t1() - tau);
    const auto steps = static_cast<std::size_t>(n - std::llabs(offset));
    const auto src0 = static_cast<std::size_t>(std::max<long long>(offset, 0));

    SamplePath out(TimeGrid(r0, r1, steps), path.dim());
    for (std::size_t i = 0; i <= steps; ++i)
        for (std::size_t c = 0; c < path.dim(); ++c)
            out.at(i, c) = path.at(src0 + i, c) - path.at(*ref, c);
    return out;
}

}  // namespace fracsync
