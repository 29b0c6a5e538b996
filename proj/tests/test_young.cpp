#include <doctest.h>

#include <cmath>

#include "fracsync/fbm.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/young.hpp"

using namespace fracsync;

namespace {

SamplePath scalar_path(const TimeGrid& grid, double (*f)(double)) {
    SamplePath p(grid, 1);
    for (std::size_t i = 0; i < p.points(); ++i) p.at(i) = f(grid.time(i));
    return p;
}

}  // namespace

TEST_CASE("constant integrand telescopes exactly") {
    const TimeGrid grid(0.0, 1.0, 256);
    const SamplePath x = sample_fbm(grid, HurstParameter(0.75), {15, 0});
    SamplePath c(grid, 1);
    for (std::size_t i = 0; i < c.points(); ++i) c.at(i) = 2.5;
    const YoungResult r = young_integral(c, x, grid, 0.7, 0.7);
    CHECK(r.value[0] == doctest::Approx(2.5 * (x.at(256) - x.at(0))).epsilon(1e-12));
    CHECK(r.refinement_gap < 1e-12);
}

TEST_CASE("riemann case: integral of t dt") {
    const TimeGrid grid(0.0, 1.0, 512);
    const SamplePath t_path = scalar_path(grid, [](double t) { return t; });
    const YoungResult r = young_integral(t_path, t_path, grid, 0.9, 0.9);
    CHECK(std::abs(r.value[0] - 0.5) <= grid.spacing());
}

TEST_CASE("chain rule: integral of X dX against fbm") {
    const TimeGrid grid(0.0, 1.0, 4096);
    const FbmSampler sampler(grid, HurstParameter(0.75));
    std::size_t within_estimate = 0;
    const std::size_t trials = 24;
    for (std::size_t k = 0; k < trials; ++k) {
        const SamplePath x = sampler.sample({23, k});
        const YoungResult r = young_integral(x, x, grid, 0.7, 0.7);
        const double exact = 0.5 * (x.at(4096) * x.at(4096) - x.at(0) * x.at(0));
        if (std::abs(r.value[0] - exact) <= r.error_estimate) ++within_estimate;
        CHECK(r.alpha_beta_margin == doctest::Approx(0.4));
    }
    CHECK(within_estimate >= trials - 2);
}

TEST_CASE("refinement gap decays at the young rate") {
    const TimeGrid fine(0.0, 1.0, 4096);
    const FbmSampler sampler(fine, HurstParameter(0.75));
    Vec orders;
    for (std::size_t k = 0; k < 30; ++k) {
        const SamplePath x = sampler.sample({37, k});
        Vec log_h, log_gap;
        for (std::size_t str : {4u, 2u, 1u}) {
            const SamplePath xs = stride(x, str);
            const YoungResult r = young_integral(xs, xs, xs.grid(), 0.7, 0.7);
            log_h.push_back(std::log(xs.grid().spacing()));
            log_gap.push_back(std::log(r.refinement_gap));
        }
        orders.push_back(linear_fit(log_h, log_gap).slope);
    }
    CHECK(median(orders) >= 2.0 * 0.7 - 1.0);
}

TEST_CASE("linearity and additivity of the lattice sum") {
    const TimeGrid grid(0.0, 1.0, 256);
    const SamplePath x = sample_fbm(grid, HurstParameter(0.8), {44, 0});
    const SamplePath y1 = sample_fbm(grid, HurstParameter(0.8), {44, 1});
    const SamplePath y2 = sample_fbm(grid, HurstParameter(0.8), {44, 2});
    SamplePath combo(grid, 1);
    for (std::size_t i = 0; i < grid.points(); ++i)
        combo.at(i) = 2.0 * y1.at(i) - 3.0 * y2.at(i);

    const double lhs = young_integral(combo, x, grid, 0.7, 0.7).value[0];
    const double rhs = 2.0 * young_integral(y1, x, grid, 0.7, 0.7).value[0] -
                       3.0 * young_integral(y2, x, grid, 0.7, 0.7).value[0];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

    const TimeGrid left(0.0, 0.5, 128), right(0.5, 1.0, 128);
    const double whole = young_integral(y1, x, grid, 0.7, 0.7).value[0];
    const double split = young_integral(y1, x, left, 0.7, 0.7).value[0] +
                         young_integral(y1, x, right, 0.7, 0.7).value[0];
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("smooth integrator matches calculus") {
    // int_0^1 t^2 d(sin t) = 2 cos 1 - sin 1 by parts.
    const TimeGrid grid(0.0, 1.0, 1024);
    const SamplePath y = scalar_path(grid, [](double t) { return t * t; });
    const SamplePath x = scalar_path(grid, [](double t) { return std::sin(t); });
    const YoungResult r = young_integral(y, x, grid, 0.9, 0.9);
    const double exact = 2.0 * std::cos(1.0) - std::sin(1.0);
    CHECK(std::abs(r.value[0] - exact) < 5e-3);
}

TEST_CASE("regularity and lattice errors") {
    const TimeGrid grid(0.0, 1.0, 64);
    const SamplePath x = sample_fbm(grid, HurstParameter(0.75), {3, 3});
    CHECK_THROWS_AS(young_integral(x, x, grid, 0.5, 0.5), RegularityViolation);
    const SamplePath other = sample_fbm(TimeGrid(0.0, 1.0, 96), HurstParameter(0.75), {3, 4});
    CHECK_THROWS_AS(young_integral(other, x, grid, 0.7, 0.7), GridMismatch);
}

TEST_CASE("young-euler reproduces pure noise integration exactly") {
    const TimeGrid grid(0.0, 1.0, 128);
    const SamplePath noise = sample_fbm(grid, HurstParameter(0.75), {5, 9});
    DriftSpec zero;
    zero.name = "zero";
    zero.apply = [](const Vec& x, Vec& out) { out.assign(x.size(), 0.0); };
    zero.linear_growth_l = 0.0;
    const SamplePath x = young_euler_sde(zero, 0.0, {1.0}, noise, {0.25}, grid);
    for (std::size_t i = 0; i < x.points(); ++i)
        CHECK(x.at(i) == doctest::Approx(0.25 + noise.at(i) - noise.at(0)).epsilon(1e-14));
}

TEST_CASE("young-euler with zero noise is forward euler") {
    const TimeGrid grid(0.0, 2.0, 256);
    const SamplePath noise(grid, 1);
    const SamplePath x =
        young_euler_sde(make_linear_drift(), 0.0, {0.0}, noise, {1.0}, grid);
    const double h = grid.spacing();
    double expected = 1.0;
    for (std::size_t i = 0; i < x.points(); ++i) {
        CHECK(x.at(i) == doctest::Approx(expected).epsilon(1e-13));
        expected *= 1.0 - h;
    }
    CHECK(x.at(256) == doctest::Approx(std::exp(-2.0)).epsilon(0.01));
}

TEST_CASE("young-euler self-refinement shrinks at the certified rate") {
    // sup gap between solves at h and h/2 contracts by at least 2^{2 alpha - 1}.
    const std::size_t base = 512;
    const TimeGrid fine(0.0, 1.0, 4 * base);
    const FbmSampler sampler(fine, HurstParameter(0.75));
    const DriftSpec drift = make_affine_drift({1.0});
    Vec ratios;
    for (std::size_t k = 0; k < 30; ++k) {
        const SamplePath noise = sampler.sample({66, k});
        Vec gaps;
        for (std::size_t level = 0; level < 2; ++level) {
            const SamplePath coarse_noise = stride(noise, 4 >> level);
            const SamplePath fine_noise = stride(noise, 2 >> level);
            const TimeGrid cg(0.0, 1.0, base << level);
            const TimeGrid fg(0.0, 1.0, base << (level + 1));
            const SamplePath xc = young_euler_sde(drift, 1.0, {0.0}, coarse_noise, {0.5}, cg);
            const SamplePath xf = young_euler_sde(drift, 1.0, {0.0}, fine_noise, {0.5}, fg);
            double gap = 0.0;
            for (std::size_t i = 0; i < xc.points(); ++i)
                gap = std::max(gap, std::abs(xc.at(i) - xf.at(2 * i)));
            gaps.push_back(gap);
        }
        ratios.push_back(gaps[0] / gaps[1]);
    }
    CHECK(median(ratios) >= std::pow(2.0, 2.0 * 0.7 - 1.0));
}

TEST_CASE("step explosion guard") {
    const TimeGrid grid(0.0, 10.0, 16);  // h = 0.625, wildly unstable for stiff drift
    const SamplePath noise(grid, 1);
    DriftSpec stiff;
    stiff.name = "stiff";
    stiff.apply = [](const Vec& x, Vec& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -1e9 * x[i];
    };
    CHECK_THROWS_AS(young_euler_sde(stiff, 0.0, {0.0}, noise, {1.0}, grid), StepExplosion);
}
