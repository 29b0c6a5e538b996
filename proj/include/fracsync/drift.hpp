#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fracsync/rng.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

/// A drift field together with its declared growth and dissipativity
/// constants: |f(x)| <= l |x| + M and <x-y, f(x)-f(y)> <= -L |x-y|^2.
struct DriftSpec {
    std::string name;
    std::function<void(const Vec&, Vec&)> apply;  // out = f(x)
    double linear_growth_l = 1.0;
    double linear_growth_M = 0.0;
    double dissipativity_L = 1.0;

    Vec operator()(const Vec& x) const {
        Vec out(x.size());
        apply(x, out);
        return out;
    }
};

inline DriftSpec make_linear_drift() {
    DriftSpec d;
    d.name = "linear";
    d.apply = [](const Vec& x, Vec& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    };
    d.linear_growth_l = 1.0;
    d.linear_growth_M = 0.0;
    d.dissipativity_L = 1.0;
    return d;
}

/// f(x) = -x + c.
inline DriftSpec make_affine_drift(Vec offset) {
    DriftSpec d;
    d.name = "affine";
    d.linear_growth_l = 1.0;
    d.linear_growth_M = norm(offset);
    d.dissipativity_L = 1.0;
    d.apply = [c = std::move(offset)](const Vec& x, Vec& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i] + c[i];
    };
    return d;
}

/// f(x) = -x^3 - x componentwise. The growth constants certify the bound on
/// the standard test cloud of radius 2 only; one-sided dissipativity holds
/// globally with L = 1.
inline DriftSpec make_cubic_drift() {
    DriftSpec d;
    d.name = "cubic";
    d.linear_growth_l = 1.0;
    d.linear_growth_M = 16.0;
    d.dissipativity_L = 1.0;
    d.apply = [](const Vec& x, Vec& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i] * x[i] * x[i] - x[i];
    };
    return d;
}

inline DriftSpec drift_from_name(const std::string& name, const Vec& offset = {}) {
    if (name == "linear") return make_linear_drift();
    if (name == "affine") {
        if (offset.empty()) throw Error("affine drift needs an offset vector");
        return make_affine_drift(offset);
    }
    if (name == "cubic") return make_cubic_drift();
    throw Error("unknown drift '" + name + "' (catalog: linear, affine, cubic)");
}

struct DriftCheckReport {
    bool growth_ok = true;
    bool dissipativity_ok = true;
    double worst_growth_excess = 0.0;         // max of |f(x)| - (l|x| + M)
    double worst_dissipativity_excess = 0.0;  // max of <d, f(x)-f(y)> + L|d|^2
};

/// Samples the declared conditions on a cloud of radius `radius`.
inline DriftCheckReport validate_drift(const DriftSpec& drift, std::size_t dim, double radius,
                                       std::size_t samples, RngSeed seed) {
    CounterRng rng(seed);
    DriftCheckReport report;
    auto draw = [&] {
        Vec x(dim);
        for (auto& v : x) v = radius * (2.0 * rng.uniform01() - 1.0);
        return x;
    };
    for (std::size_t k = 0; k < samples; ++k) {
        const Vec x = draw();
        const Vec y = draw();
        const Vec fx = drift(x);
        const Vec fy = drift(y);

        const double growth_excess =
            norm(fx) - (drift.linear_growth_l * norm(x) + drift.linear_growth_M);
        report.worst_growth_excess = std::max(report.worst_growth_excess, growth_excess);

        double inner = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = x[i] - y[i];
            inner += d * (fx[i] - fy[i]);
            d2 += d * d;
        }
        const double diss_excess = inner + drift.dissipativity_L * d2;
        report.worst_dissipativity_excess =
            std::max(report.worst_dissipativity_excess, diss_excess);
    }
    report.growth_ok = report.worst_growth_excess <= 1e-9;
    report.dissipativity_ok = report.worst_dissipativity_excess <= 1e-9;
    return report;
}

}  // namespace fracsync
