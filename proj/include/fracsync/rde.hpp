#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fracsync/drift.hpp"
#include "fracsync/path.hpp"
#include "fracsync/transform.hpp"
#include "fracsync/types.hpp"

namespace fracsync {

enum class RdeScheme { heun, euler };

namespace detail {

inline void check_finite(const Vec& x, double t) {
    for (double v : x)
        if (std::abs(v) > 1e12)
            throw StepExplosion("trajectory exceeded 1e12 at t = " + std::to_string(t));
}

/// One explicit step of du/dt = field(u, index). The field is sampled at the
/// lattice indices k (stage 1) and k+1 (stage 2 of Heun).
template <class Field>
inline void explicit_step(Field&& field, Vec& u, std::size_t k, double h, RdeScheme scheme,
                          Vec& k1, Vec& k2, Vec& tmp) {
    field(u, k, k1);
    if (scheme == RdeScheme::euler) {
        for (std::size_t c = 0; c < u.size(); ++c) u[c] += h * k1[c];
        return;
    }
    for (std::size_t c = 0; c < u.size(); ++c) tmp[c] = u[c] + h * k1[c];
    field(tmp, k + 1, k2);
    for (std::size_t c = 0; c < u.size(); ++c) u[c] += 0.5 * h * (k1[c] + k2[c]);
}

}  // namespace detail

/// Pathwise integration of du/dt = F(u, O_t) with the fOU path as a frozen
/// coefficient. Heun by default (the field is an ordinary coefficient in
/// time, so second order is attainable pathwise).
inline SamplePath integrate_rde(const DriftSpec& drift, const LinearNoiseCoeffs& coeffs,
                                const SamplePath& fou, const Vec& u0, const TimeGrid& window,
                                RdeScheme scheme = RdeScheme::heun) {
    const std::size_t f0 = window_start_index(fou, window);
    const std::size_t d = u0.size();
    const double h = window.spacing();

    Vec arg(d);
    auto field = [&](const Vec& u, std::size_t idx, Vec& out) {
        rde_vector_field(u, fou.at(f0 + idx), coeffs, drift, arg, out);
    };

    SamplePath out(window, d);
    Vec u = u0, k1(d), k2(d), tmp(d);
    out.set_value(0, u);
    for (std::size_t k = 0; k < window.steps(); ++k) {
        detail::explicit_step(field, u, k, h, scheme, k1, k2, tmp);
        detail::check_finite(u, window.time(k + 1));
        out.set_value(k + 1, u);
    }
    return out;
}

/// Configuration of the coupled pathwise system: two transformed channels
/// with linear cross coupling of strength kappa; both drifts share the
/// dissipativity constant L.
struct CoupledConfig {
    LinearNoiseCoeffs coeffs1;
    LinearNoiseCoeffs coeffs2;
    DriftSpec drift_f;
    DriftSpec drift_g;
    HurstParameter H1;
    HurstParameter H2;
    double kappa = 0.0;
    double dissipativity_L = 1.0;

    void validate() const {
        if (kappa < 0.0) throw Error("coupling strength kappa must be nonnegative");
        if (!(dissipativity_L > 0.0)) throw Error("dissipativity constant L must be positive");
        if (coeffs1.dim() != coeffs2.dim()) throw Error("channel dimensions differ");
    }

    CoupledConfig with_kappa(double k) const {
        CoupledConfig c = *this;
        c.kappa = k;
        return c;
    }
};

struct CoupledState {
    Vec u;
    Vec v;
};

struct CoupledTrajectory {
    TimeGrid grid;
    std::size_t dim;
    Vec u_data;  // points x dim, row-major
    Vec v_data;

    CoupledTrajectory(TimeGrid g, std::size_t d)
        : grid(g), dim(d), u_data(g.points() * d, 0.0), v_data(g.points() * d, 0.0) {}

    Vec u(std::size_t i) const { return Vec(&u_data[i * dim], &u_data[i * dim] + dim); }
    Vec v(std::size_t i) const { return Vec(&v_data[i * dim], &v_data[i * dim] + dim); }

    void set(std::size_t i, const Vec& uu, const Vec& vv) {
        for (std::size_t c = 0; c < dim; ++c) {
            u_data[i * dim + c] = uu[c];
            v_data[i * dim + c] = vv[c];
        }
    }

    double gap_sq(std::size_t i) const {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double d = u_data[i * dim + c] - v_data[i * dim + c];
            s += d * d;
        }
        return s;
    }

    Vec mid(std::size_t i) const {
        Vec m(dim);
        for (std::size_t c = 0; c < dim; ++c)
            m[c] = 0.5 * (u_data[i * dim + c] + v_data[i * dim + c]);
        return m;
    }
};

/// Strang-split integrator for du/dt = F(u,.) + kappa (v - u),
/// dv/dt = G(v,.) + kappa (u - v). The coupling subsystem is solved exactly
/// through its eigenmodes (the sum is invariant, the difference contracts by
/// exp(-2 kappa h) per step), so the scheme is uniformly stable in kappa.
/// With kappa = 0 the coupling stage is skipped entirely and the result is
/// bit-identical to two independent single-channel integrations.
template <class FieldF, class FieldG>
inline CoupledTrajectory integrate_coupled_fields(FieldF&& field_f, FieldG&& field_g,
                                                  const CoupledState& state0,
                                                  const TimeGrid& window, double kappa,
                                                  RdeScheme scheme = RdeScheme::heun) {
    const std::size_t d = state0.u.size();
    if (state0.v.size() != d) throw Error("coupled state channels must share a dimension");
    const double h = window.spacing();
    const double half_factor = std::exp(-kappa * h);  // contraction over h/2 of exp(-2 kappa t)

    CoupledTrajectory traj(window, d);
    Vec u = state0.u, v = state0.v;
    Vec k1(d), k2(d), tmp(d);
    traj.set(0, u, v);

    auto mix = [&](Vec& a, Vec& b) {
        for (std::size_t c = 0; c < d; ++c) {
            const double m = 0.5 * (a[c] + b[c]);
            const double q = 0.5 * (a[c] - b[c]) * half_factor;
            a[c] = m + q;
            b[c] = m - q;
        }
    };

    for (std::size_t k = 0; k < window.steps(); ++k) {
        if (kappa > 0.0) mix(u, v);
        detail::explicit_step(field_f, u, k, h, scheme, k1, k2, tmp);
        detail::explicit_step(field_g, v, k, h, scheme, k1, k2, tmp);
        if (kappa > 0.0) mix(u, v);
        detail::check_finite(u, window.time(k + 1));
        detail::check_finite(v, window.time(k + 1));
        traj.set(k + 1, u, v);
    }
    return traj;
}

inline CoupledTrajectory integrate_coupled(const CoupledConfig& cfg, const SamplePath& fou1,
                                           const SamplePath& fou2, const CoupledState& state0,
                                           const TimeGrid& window,
                                           RdeScheme scheme = RdeScheme::heun) {
    cfg.validate();
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t d = state0.u.size();
    Vec arg_f(d), arg_g(d);
    auto field_f = [&](const Vec& u, std::size_t idx, Vec& out) {
        rde_vector_field(u, fou1.at(i1 + idx), cfg.coeffs1, cfg.drift_f, arg_f, out);
    };
    auto field_g = [&](const Vec& v, std::size_t idx, Vec& out) {
        rde_vector_field(v, fou2.at(i2 + idx), cfg.coeffs2, cfg.drift_g, arg_g, out);
    };
    return integrate_coupled_fields(field_f, field_g, state0, window, cfg.kappa, scheme);
}

/// Heun integration of the averaged field, the arithmetic mean of the two
/// transformed channel fields evaluated at the same state.
inline SamplePath integrate_averaged(const CoupledConfig& cfg, const SamplePath& fou1,
                                     const SamplePath& fou2, const Vec& w0,
                                     const TimeGrid& window) {
    cfg.validate();
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);
    const std::size_t d = w0.size();
    const double h = window.spacing();
    Vec arg(d), f_part(d);
    auto field = [&](const Vec& w, std::size_t idx, Vec& out) {
        rde_vector_field(w, fou1.at(i1 + idx), cfg.coeffs1, cfg.drift_f, arg, f_part);
        rde_vector_field(w, fou2.at(i2 + idx), cfg.coeffs2, cfg.drift_g, arg, out);
        for (std::size_t c = 0; c < d; ++c) out[c] = 0.5 * (f_part[c] + out[c]);
    };

    SamplePath out(window, d);
    Vec w = w0, k1(d), k2(d), tmp(d);
    out.set_value(0, w);
    for (std::size_t k = 0; k < window.steps(); ++k) {
        detail::explicit_step(field, w, k, h, RdeScheme::heun, k1, k2, tmp);
        detail::check_finite(w, window.time(k + 1));
        out.set_value(k + 1, w);
    }
    return out;
}

struct SdeReconstruction {
    CoupledTrajectory xy;         // solution of the coupled SDE system
    CoupledTrajectory uv;         // underlying transformed solution
    SamplePath eta;               // (a1 O1 - a2 O2) / 2
    CoupledTrajectory reference;  // averaged solution mapped through both inverses
};

/// Integrates the coupled transformed system and maps it back through the
/// channel inverses to the (X, Y) trajectories of the coupled SDE system;
/// also exposes the eta path and the reference pair built from the averaged
/// solution started at the channel midpoint.
inline SdeReconstruction reconstruct_coupled_sde(const CoupledConfig& cfg,
                                                 const SamplePath& fou1, const SamplePath& fou2,
                                                 const SamplePath& noise1,
                                                 const SamplePath& noise2,
                                                 const CoupledState& xy0,
                                                 const TimeGrid& window) {
    cfg.validate();
    window_start_index(noise1, window);
    window_start_index(noise2, window);
    const std::size_t i1 = window_start_index(fou1, window);
    const std::size_t i2 = window_start_index(fou2, window);

    CoupledState uv0{forward_transform(xy0.u, fou1.at(i1), cfg.coeffs1),
                     forward_transform(xy0.v, fou2.at(i2), cfg.coeffs2)};
    CoupledTrajectory uv = integrate_coupled(cfg, fou1, fou2, uv0, window);

    Vec w0(uv0.u.size());
    for (std::size_t c = 0; c < w0.size(); ++c) w0[c] = 0.5 * (uv0.u[c] + uv0.v[c]);
    const SamplePath w_bar = integrate_averaged(cfg, fou1, fou2, w0, window);

    SdeReconstruction rec{CoupledTrajectory(window, uv.dim), std::move(uv),
                          SamplePath(window, 1), CoupledTrajectory(window, w0.size())};
    for (std::size_t i = 0; i <= window.steps(); ++i) {
        const double o1 = fou1.at(i1 + i);
        const double o2 = fou2.at(i2 + i);
        rec.xy.set(i, inverse_transform(rec.uv.u(i), o1, cfg.coeffs1),
                   inverse_transform(rec.uv.v(i), o2, cfg.coeffs2));
        rec.eta.at(i) = 0.5 * (cfg.coeffs1.a * o1 - cfg.coeffs2.a * o2);
        rec.reference.set(i, inverse_transform(w_bar.value(i), o1, cfg.coeffs1),
                          inverse_transform(w_bar.value(i), o2, cfg.coeffs2));
    }
    return rec;
}

}  // namespace fracsync
