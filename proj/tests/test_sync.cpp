#include <doctest.h>

#include <cmath>

#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/sync.hpp"

using namespace fracsync;

namespace {

SamplePath constant_path(const TimeGrid& grid, double c) {
    SamplePath p(grid, 1);
    for (std::size_t i = 0; i < p.points(); ++i) p.at(i) = c;
    return p;
}

DriftSpec zero_drift() {
    DriftSpec d;
    d.name = "zero";
    d.apply = [](const Vec& x, Vec& out) { out.assign(x.size(), 0.0); };
    d.linear_growth_l = 0.0;
    return d;
}

struct NoisePair {
    SamplePath o1;
    SamplePath o2;
};

NoisePair sampled_fous(const TimeGrid& window, std::uint64_t seed, std::uint64_t trial,
                       double h1 = 0.75, double h2 = 0.65) {
    const double h = window.spacing();
    const auto extra = static_cast<std::size_t>(std::ceil(20.0 / h));
    const TimeGrid noise_grid(window.t0() - static_cast<double>(extra) * h, window.t1(),
                              window.steps() + extra);
    const FbmSampler s1(noise_grid, HurstParameter(h1));
    const FbmSampler s2(noise_grid, HurstParameter(h2));
    return {fou_stationary(s1.sample({seed, 2 * trial}), window),
            fou_stationary(s2.sample({seed, 2 * trial + 1}), window)};
}

}  // namespace

TEST_CASE("contraction rate of the deterministic linear system") {
    const TimeGrid window(0.0, 10.0, 640);
    SUBCASE("zero noise coordinate: slope -2L") {
        const SamplePath o(window, 1);
        const SyncReport rep = contraction_test(make_linear_drift(), LinearNoiseCoeffs(1.0, {0.0}),
                                                o, {{{2.0}, {-1.0}}}, window);
        CHECK(rep.fitted_rate == doctest::Approx(-2.0).epsilon(0.025));
        CHECK(rep.pass);
    }
    SUBCASE("constant noise coordinate: slope 2(-1 + c)") {
        const double c = 0.4;
        const SamplePath o = constant_path(window, c);
        const SyncReport rep = contraction_test(make_linear_drift(), LinearNoiseCoeffs(1.0, {0.0}),
                                                o, {{{2.0}, {-1.0}}}, window);
        CHECK(rep.fitted_rate == doctest::Approx(2.0 * (-1.0 + c)).epsilon(0.025));
    }
}

TEST_CASE("contraction rate under fbm noise stays dissipative") {
    const TimeGrid window(0.0, 20.0, 1280);
    Vec slopes;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const NoisePair np = sampled_fous(window, 515, k);
        const SyncReport rep = contraction_test(make_linear_drift(), LinearNoiseCoeffs(0.5, {0.0}),
                                                np.o1, {{{2.0}, {-2.0}}}, window);
        slopes.push_back(rep.fitted_rate);
    }
    CHECK(median(slopes) <= -1.0);
}

TEST_CASE("absorbing radius closed forms") {
    const TimeGrid grid(-25.0, 0.0, 1600);
    SUBCASE("vanishing integrand gives exactly one") {
        const SamplePath o(grid, 1);
        const AbsorbingRadius r =
            absorbing_radius(make_linear_drift(), LinearNoiseCoeffs(1.0, {0.0}), o, 20.0);
        CHECK(r.R_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.tail_bound == doctest::Approx(std::exp(-20.0)));
    }
    SUBCASE("affine drift with f(0) = 1 integrates to three") {
        const SamplePath o(grid, 1);
        const AbsorbingRadius r =
            absorbing_radius(make_affine_drift({1.0}), LinearNoiseCoeffs(1.0, {0.0}), o, 20.0);
        CHECK(r.R_squared == doctest::Approx(3.0).epsilon(2e-3));
    }
    SUBCASE("sampled noise: stable under quadrature refinement") {
        const TimeGrid noise_fine(-45.0, 0.0, 45 * 128);
        const SamplePath noise = sample_fbm(noise_fine, HurstParameter(0.75), {31, 7});
        const TimeGrid wf(-25.0, 0.0, 25 * 128);
        const TimeGrid wc(-25.0, 0.0, 25 * 64);
        const SamplePath of = fou_stationary(noise, wf);
        const SamplePath oc = fou_stationary(stride(noise, 2), wc);
        const LinearNoiseCoeffs coeffs(0.5, {0.3});
        const DriftSpec drift = make_affine_drift({1.0});
        const AbsorbingRadius rf = absorbing_radius(drift, coeffs, of, 20.0);
        const AbsorbingRadius rc = absorbing_radius(drift, coeffs, oc, 20.0);
        CHECK(std::abs(rf.R_squared - rc.R_squared) / rf.R_squared < 0.01);
        CHECK(rf.R_squared >= 1.0);
    }
}

TEST_CASE("pullback cloud collapses") {
    SUBCASE("degenerate cloud has zero diameter") {
        const TimeGrid grid(-21.0, 0.0, 672);
        const SamplePath o(grid, 1);
        const PullbackReport rep = pullback_attractor_estimate(
            make_linear_drift(), LinearNoiseCoeffs(1.0, {0.0}), o, {-1.0}, 0.0);
        CHECK(rep.diameters[0] == 0.0);
    }
    SUBCASE("deterministic contraction: diameter 2 r e^{-T}") {
        const TimeGrid grid(-21.0, 0.0, 1344);
        const SamplePath o(grid, 1);
        const PullbackReport rep = pullback_attractor_estimate(
            make_linear_drift(), LinearNoiseCoeffs(1.0, {0.0}), o, {-20.0}, 10.0);
        CHECK(rep.final_diameter <= 5e-8);
        CHECK(rep.final_diameter == doctest::Approx(20.0 * std::exp(-20.0)).epsilon(1e-2));
    }
    SUBCASE("fbm-driven diameters decrease in the start time") {
        const TimeGrid window(-20.0, 0.0, 1280);
        Vec finals;
        bool all_decreasing = true;
        for (std::uint64_t k = 0; k < 20; ++k) {
            const NoisePair np = sampled_fous(window, 616, k);
            const PullbackReport rep = pullback_attractor_estimate(
                make_linear_drift(), LinearNoiseCoeffs(0.5, {0.0}), np.o1,
                {-5.0, -10.0, -20.0}, 10.0);
            all_decreasing = all_decreasing && rep.strictly_decreasing;
            finals.push_back(rep.final_diameter);
        }
        CHECK(all_decreasing);
        CHECK(median(finals) < 1e-3);
    }
}

TEST_CASE("integrated contraction matrix eigenvalues: hand cases") {
    const TimeGrid window(0.0, 1.0, 64);
    const SamplePath o(window, 1);
    DriftSpec lin = make_linear_drift();
    SUBCASE("kappa = 1: eigenvalues of [[-3, 1], [1, -3]] t") {
        CoupledConfig cfg{LinearNoiseCoeffs(1.0, {0.0}), LinearNoiseCoeffs(1.0, {0.0}), lin, lin,
                          HurstParameter(0.75), HurstParameter(0.75), 1.0, 1.0};
        const EigenBoundReport rep = coupled_contraction_eigs(
            cfg, o, o, window, CoupledState{{1.0}, {0.5}}, CoupledState{{0.0}, {0.0}});
        CHECK(rep.eig_max.back() == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(rep.onset_found);
        CHECK(rep.bound_holds_after_onset);
    }
    SUBCASE("kappa = 0: both eigenvalues -2 L t") {
        CoupledConfig cfg{LinearNoiseCoeffs(1.0, {0.0}), LinearNoiseCoeffs(1.0, {0.0}), lin, lin,
                          HurstParameter(0.75), HurstParameter(0.75), 0.0, 1.0};
        const EigenBoundReport rep = coupled_contraction_eigs(
            cfg, o, o, window, CoupledState{{1.0}, {0.5}}, CoupledState{{0.0}, {0.0}});
        CHECK(rep.eig_max.back() == doctest::Approx(-2.0).epsilon(1e-9));
    }
}

TEST_CASE("comparison bound dominates realized gaps under fbm noise") {
    const TimeGrid window(0.0, 20.0, 1280);
    CoupledConfig cfg{LinearNoiseCoeffs(0.25, {0.3}), LinearNoiseCoeffs(0.2, {0.2}),
                      make_affine_drift({1.0}), make_affine_drift({-1.0}),
                      HurstParameter(0.75), HurstParameter(0.65), 10.0, 1.0};
    Vec violations;
    Vec bound_ok;
    for (std::uint64_t k = 0; k < 12; ++k) {
        const NoisePair np = sampled_fous(window, 717, k);
        const EigenBoundReport rep = coupled_contraction_eigs(
            cfg, np.o1, np.o2, window, CoupledState{{1.5}, {-0.5}},
            CoupledState{{0.5}, {0.0}});
        violations.push_back(rep.comparison_max_rel_violation);
        bound_ok.push_back(rep.onset_found && rep.bound_holds_after_onset ? 1.0 : 0.0);
    }
    CHECK(median(violations) <= 1e-6);
    CHECK(median(bound_ok) == 1.0);
}

TEST_CASE("gap sweep on the exactly solvable coupling") {
    const TimeGrid window(0.0, 2.0, 256);
    const SamplePath o(window, 1);
    DriftSpec zero = zero_drift();
    CoupledConfig cfg{LinearNoiseCoeffs(1.0, {0.0}), LinearNoiseCoeffs(1.0, {0.0}), zero, zero,
                      HurstParameter(0.75), HurstParameter(0.75), 0.0, 1.0};
    const Vec kappas{1.0, 10.0, 100.0};
    const SweepResult res = sync_gap_sweep(cfg, kappas, o, o, window, {{1.0}, {0.0}});
    REQUIRE(res.reports.size() == 3);
    // gap_sq(t) = e^{-4 kappa t}; compare the trapezoid average over [1, 2]
    const double h = window.spacing();
    for (std::size_t i = 0; i < 3; ++i) {
        const double r = std::exp(-4.0 * kappas[i] * h);
        double acc = 0.0;
        double g = std::exp(-4.0 * kappas[i] * 1.0);
        for (std::size_t k = 128; k < 256; ++k) {
            acc += 0.5 * h * (g + g * r);
            g *= r;
        }
        const double expected = acc / 1.0;
        CHECK(res.reports[i].steady_gap == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(res.monotone);
    CHECK(res.pass);
}

TEST_CASE("gap sweep is null for identical channels") {
    const TimeGrid window(0.0, 4.0, 256);
    const NoisePair np = sampled_fous(window, 818, 0);
    CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.3}), LinearNoiseCoeffs(0.5, {0.3}),
                      make_affine_drift({1.0}), make_affine_drift({1.0}),
                      HurstParameter(0.75), HurstParameter(0.75), 0.0, 1.0};
    const SweepResult res =
        sync_gap_sweep(cfg, {1.0, 10.0, 100.0}, np.o1, np.o1, window, {{0.8}, {0.8}});
    for (const SyncReport& rep : res.reports) {
        CHECK(rep.steady_gap == 0.0);
        for (const auto& [t, g] : rep.gap_trajectory) CHECK(g == 0.0);
    }
    CHECK(res.pass);
}

TEST_CASE("gap sweep contracts under fbm noise") {
    const TimeGrid window(0.0, 20.0, 1280);
    CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.3}), LinearNoiseCoeffs(0.4, {0.2}),
                      make_affine_drift({1.0}), make_affine_drift({-1.0}),
                      HurstParameter(0.75), HurstParameter(0.65), 0.0, 1.0};
    std::vector<Vec> gaps(3, Vec());
    for (std::uint64_t k = 0; k < 12; ++k) {
        const NoisePair np = sampled_fous(window, 919, k);
        const SweepResult res =
            sync_gap_sweep(cfg, {1.0, 10.0, 100.0}, np.o1, np.o2, window, {{2.0}, {-1.0}});
        for (std::size_t i = 0; i < 3; ++i) gaps[i].push_back(res.reports[i].steady_gap);
    }
    const double g0 = median(gaps[0]), g1 = median(gaps[1]), g2 = median(gaps[2]);
    CHECK(g1 < g0);
    CHECK(g2 < g1);
    CHECK(g2 <= g0 / 10.0);
}

TEST_CASE("averaged sweep: identical halves give a null distance") {
    const TimeGrid window(0.0, 4.0, 256);
    const NoisePair np = sampled_fous(window, 121, 0);
    CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.3}), LinearNoiseCoeffs(0.5, {0.3}),
                      make_affine_drift({1.0}), make_affine_drift({1.0}),
                      HurstParameter(0.75), HurstParameter(0.75), 0.0, 1.0};
    const SweepResult res =
        averaged_limit_sweep(cfg, {1.0, 10.0}, np.o1, np.o1, window, {{0.8}, {0.8}});
    for (const SyncReport& rep : res.reports) CHECK(rep.reference_distance == 0.0);
}

TEST_CASE("averaged sweep approaches the linear fixed point at rate 1/kappa") {
    // f(x) = -x + 1, g(x) = -3x, zero noise: the coupled fixed point is
    // ((3 + kappa) / (3 + 4 kappa), kappa / (3 + 4 kappa)) and the averaged
    // equation settles at 1/4; the midpoint offset is 3 / (4 (3 + 4 kappa)).
    const TimeGrid window(0.0, 20.0, 1280);
    const SamplePath o(window, 1);
    DriftSpec g3;
    g3.name = "steep";
    g3.apply = [](const Vec& x, Vec& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -3.0 * x[i];
    };
    g3.dissipativity_L = 3.0;
    CoupledConfig cfg{LinearNoiseCoeffs(1.0, {0.0}), LinearNoiseCoeffs(1.0, {0.0}),
                      make_affine_drift({1.0}), g3, HurstParameter(0.75),
                      HurstParameter(0.75), 0.0, 1.0};
    const Vec kappas{1.0, 10.0, 100.0};
    const SweepResult res = averaged_limit_sweep(cfg, kappas, o, o, window, {{1.0}, {0.5}});
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const double expected = 3.0 / (4.0 * (3.0 + 4.0 * kappas[i]));
        CHECK(res.reports[i].reference_distance ==
              doctest::Approx(expected).epsilon(0.05));
    }
    CHECK(res.monotone);
}

TEST_CASE("averaged sweep distance decreases under fbm noise") {
    const TimeGrid window(0.0, 20.0, 1280);
    CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.3}), LinearNoiseCoeffs(0.4, {0.2}),
                      make_affine_drift({1.0}), make_affine_drift({-1.0}),
                      HurstParameter(0.75), HurstParameter(0.65), 0.0, 1.0};
    std::vector<Vec> dists(3, Vec());
    for (std::uint64_t k = 0; k < 12; ++k) {
        const NoisePair np = sampled_fous(window, 232, k);
        const SweepResult res = averaged_limit_sweep(cfg, {1.0, 10.0, 100.0}, np.o1, np.o2,
                                                     window, {{2.0}, {-1.0}});
        for (std::size_t i = 0; i < 3; ++i) dists[i].push_back(res.reports[i].reference_distance);
    }
    CHECK(median(dists[1]) < median(dists[0]));
    CHECK(median(dists[2]) < median(dists[1]));
}

TEST_CASE("pure multiplicative case") {
    SUBCASE("rejects nonzero b") {
        const TimeGrid window(0.0, 2.0, 128);
        const SamplePath o(window, 1);
        CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.3}), LinearNoiseCoeffs(0.4, {0.0}),
                          make_affine_drift({1.0}), make_affine_drift({-1.0}),
                          HurstParameter(0.75), HurstParameter(0.65), 0.0, 1.0};
        CHECK_THROWS_AS(
            case_pure_multiplicative(cfg, {1.0}, o, o, window, {{1.0}, {0.0}}), Error);
    }
    SUBCASE("averaged field at zero noise is the plain drift average") {
        const TimeGrid window(0.0, 8.0, 512);
        const SamplePath o(window, 1);
        CoupledConfig cfg{LinearNoiseCoeffs(1.0, {0.0}), LinearNoiseCoeffs(1.0, {0.0}),
                          make_linear_drift(), make_affine_drift({2.0}),
                          HurstParameter(0.75), HurstParameter(0.75), 0.0, 1.0};
        // dW/dt = (-W + (-W + 2)) / 2 = -W + 1 from W(0) = 0
        const SamplePath w = integrate_averaged(cfg, o, o, {0.0}, window);
        CHECK(w.at(512) == doctest::Approx(1.0 - std::exp(-8.0)).epsilon(1e-6));
        const CaseReport rep =
            case_pure_multiplicative(cfg, {1.0, 10.0, 100.0}, o, o, window, {{1.0}, {0.0}});
        CHECK(rep.pass);
    }
    SUBCASE("fbm-driven pipeline passes its own reconstruction tolerance") {
        const TimeGrid window(0.0, 20.0, 1280);
        CoupledConfig cfg{LinearNoiseCoeffs(0.5, {0.0}), LinearNoiseCoeffs(0.4, {0.0}),
                          make_affine_drift({1.0}), make_affine_drift({-1.0}),
                          HurstParameter(0.75), HurstParameter(0.65), 0.0, 1.0};
        Vec pass_flags;
        for (std::uint64_t k = 0; k < 8; ++k) {
            const NoisePair np = sampled_fous(window, 343, k);
            const CaseReport rep = case_pure_multiplicative(cfg, {1.0, 10.0, 100.0}, np.o1,
                                                            np.o2, window, {{2.0}, {-1.0}});
            pass_flags.push_back(rep.pass ? 1.0 : 0.0);
        }
        CHECK(median(pass_flags) == 1.0);
    }
}

TEST_CASE("mixed noise case") {
    SUBCASE("additive transform roundtrip is exact") {
        // Y = V + b2 O2 recovered from V = Y - b2 O2.
        const double b2 = 0.7, o = 1.3, y = 2.4;
        const double v = y - b2 * o;
        CHECK(v + b2 * o == doctest::Approx(y).epsilon(1e-15));
    }
    SUBCASE("b2 = 0 reduces the additive channel to the plain drift") {
        const TimeGrid window(0.0, 4.0, 256);
        const SamplePath o(window, 1);
        MixedConfig mix{1.0, {0.0}, {0.0}, make_affine_drift({1.0}), make_linear_drift(), 1.0};
        const CaseReport rep =
            case_mixed_noise(mix, {1.0, 10.0}, o, o, window, {{1.0}, {1.0}});
        CHECK(rep.gap_sweep.monotone);
    }
    SUBCASE("fbm-driven gaps decrease monotonically") {
        const TimeGrid window(0.0, 20.0, 1280);
        MixedConfig mix{0.5, {0.3}, {0.4}, make_affine_drift({1.0}),
                        make_affine_drift({-1.0}), 1.0};
        std::vector<Vec> gaps(3, Vec());
        Vec pass_flags;
        for (std::uint64_t k = 0; k < 8; ++k) {
            const NoisePair np = sampled_fous(window, 454, k);
            const CaseReport rep = case_mixed_noise(mix, {1.0, 10.0, 100.0}, np.o1, np.o2,
                                                    window, {{2.0}, {-1.0}});
            for (std::size_t i = 0; i < 3; ++i)
                gaps[i].push_back(rep.gap_sweep.reports[i].steady_gap);
            pass_flags.push_back(rep.pass ? 1.0 : 0.0);
        }
        CHECK(median(gaps[1]) < median(gaps[0]));
        CHECK(median(gaps[2]) < median(gaps[1]));
        CHECK(median(pass_flags) == 1.0);
    }
    SUBCASE("mixed eigenvalue bound") {
        const TimeGrid window(0.0, 20.0, 1280);
        MixedConfig mix{0.25, {0.3}, {0.4}, make_affine_drift({1.0}),
                        make_affine_drift({-1.0}), 1.0};
        const NoisePair np = sampled_fous(window, 565, 3);
        const EigenBoundReport rep =
            mixed_contraction_eigs(mix, 10.0, np.o1, np.o2, window,
                                   CoupledState{{1.5}, {-0.5}}, CoupledState{{0.5}, {0.0}});
        CHECK(rep.onset_found);
        CHECK(rep.bound_holds_after_onset);
        CHECK(rep.comparison_max_rel_violation <= 1e-6);
    }
}
