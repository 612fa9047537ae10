#pragma once

#include <functional>
#include <stdexcept>

#include "uam/attitude.hpp"
#include "uam/core.hpp"
#include "uam/disturbance.hpp"

namespace uam {

struct PlantParams {
    double m_t = 4.85;                       // kg, total mass without payload
    double g = 9.8;                          // m/s^2
    Vec3 friction_coeffs{0.25, 0.25, 0.25};  // N s/m, diagonal viscous
    double payload_mass = 0.;                // kg, attached per scenario events
    double divergence_bound = 100.;          // m, run aborts beyond this

    void validate() const {
        if (!(m_t > 0.)) throw std::invalid_argument("plant: total mass must be positive");
        if (!(g > 0.)) throw std::invalid_argument("plant: gravity must be positive");
        if ((friction_coeffs.array() < 0.).any())
            throw std::invalid_argument("plant: friction coefficients must be non-negative");
        if (payload_mass < 0.) throw std::invalid_argument("plant: payload mass must be non-negative");
        if (!(divergence_bound > 0.))
            throw std::invalid_argument("plant: divergence bound must be positive");
    }
};

/// Reaction force of the moving arms on the multirotor:
/// F_m = m R[w x (w x r_oc)] + m R(dw x r_oc + 2 w x dr_oc + ddr_oc).
inline Vec3 coupling_force(const PlantParams& params, const UavState& uav, const Vec3& r_oc,
                           const Vec3& r_oc_dot, const Vec3& r_oc_ddot) {
    const Vec3 centripetal = uav.omega.cross(uav.omega.cross(r_oc));
    const Vec3 rest = uav.omega_dot.cross(r_oc) + 2. * uav.omega.cross(r_oc_dot) + r_oc_ddot;
    return params.m_t * (uav.R * centripetal) + params.m_t * (uav.R * rest);
}

/// Part of gravity + coupling computable from measured signals only:
/// F_c = m g e3 + m R[w x (w x r_oc)].
inline Vec3 compensable_force(const PlantParams& params, const UavState& uav, const Vec3& r_oc) {
    return params.m_t * params.g * Vec3::UnitZ() +
           params.m_t * (uav.R * uav.omega.cross(uav.omega.cross(r_oc)));
}

/// Remaining lumped uncertainty, never visible to the controller:
/// F = F_d + m R(dw x r_oc + 2 w x dr_oc + ddr_oc).
inline Vec3 lumped_uncertainty(const PlantParams& params, const UavState& uav, const Vec3& F_d,
                               const Vec3& r_oc, const Vec3& r_oc_dot, const Vec3& r_oc_ddot) {
    const Vec3 rest = uav.omega_dot.cross(r_oc) + 2. * uav.omega.cross(r_oc_dot) + r_oc_ddot;
    return F_d + params.m_t * (uav.R * rest);
}

/// Viscous friction F_f = diag(c) v.
inline Vec3 friction(const PlantParams& params, const Vec3& v) {
    return params.friction_coeffs.cwiseProduct(v);
}

/// Everything exogenous the translational dynamics need at one instant.
/// `mass` is the effective total (base plus attached payload fraction);
/// the coupling terms inside F scale with it.
struct PlantSignals {
    Mat3 R = Mat3::Identity();
    Vec3 omega = Vec3::Zero();
    Vec3 omega_dot = Vec3::Zero();
    Vec3 r_oc = Vec3::Zero();
    Vec3 r_oc_dot = Vec3::Zero();
    Vec3 r_oc_ddot = Vec3::Zero();
    Vec3 F_d = Vec3::Zero();
    double mass = 0.;   // <= 0 means "use params.m_t"
};

using SignalFn = std::function<PlantSignals(double)>;

namespace detail {

inline Vec3 plant_accel(const PlantParams& params, const Vec3& U, const Vec3& v,
                        const PlantSignals& s) {
    const double m = s.mass > 0. ? s.mass : params.m_t;
    PlantParams eff = params;
    eff.m_t = m;
    UavState att;
    att.R = s.R;
    att.omega = s.omega;
    att.omega_dot = s.omega_dot;
    const Vec3 F = lumped_uncertainty(eff, att, s.F_d, s.r_oc, s.r_oc_dot, s.r_oc_ddot);
    return (U - friction(params, v) - F) / m;
}

}  // namespace detail

/// Acceleration the plant would produce right now; used for trace logging.
inline Vec3 plant_acceleration(const UavState& state, const PlantParams& params, const Vec3& U,
                               const PlantSignals& signals) {
    return detail::plant_accel(params, U, state.v, signals);
}

/// Advances the translational state over one step of classical fixed-step
/// 4th-order integration of m(t) p_ddot = U - F_f(p_dot) - F(t). The virtual
/// input U is held over the step; attitude, CoM signals, disturbance and
/// effective mass are sampled from `signals` at the stage times. The
/// attitude fields of the returned state are refreshed from signals(t+dt).
inline UavState plant_step(const UavState& state, const PlantParams& params, const Vec3& U,
                           const SignalFn& signals, double t, double dt) {
    if (!(dt > 0.) || dt > 0.01)
        throw std::invalid_argument("plant: dt must lie in (0, 0.01] s");
    require_finite(U, "control input");

    const PlantSignals s0 = signals(t);
    const PlantSignals sh = signals(t + 0.5 * dt);
    const PlantSignals s1 = signals(t + dt);

    const Vec3 p0 = state.p, v0 = state.v;

    const Vec3 k1p = v0;
    const Vec3 k1v = detail::plant_accel(params, U, v0, s0);
    const Vec3 k2p = v0 + 0.5 * dt * k1v;
    const Vec3 k2v = detail::plant_accel(params, U, v0 + 0.5 * dt * k1v, sh);
    const Vec3 k3p = v0 + 0.5 * dt * k2v;
    const Vec3 k3v = detail::plant_accel(params, U, v0 + 0.5 * dt * k2v, sh);
    const Vec3 k4p = v0 + dt * k3v;
    const Vec3 k4v = detail::plant_accel(params, U, v0 + dt * k3v, s1);

    UavState next = state;
    next.p = p0 + dt / 6. * (k1p + 2. * k2p + 2. * k3p + k4p);
    next.v = v0 + dt / 6. * (k1v + 2. * k2v + 2. * k3v + k4v);
    next.R = s1.R;
    next.omega = s1.omega;
    next.omega_dot = s1.omega_dot;

    if (!next.p.allFinite() || !next.v.allFinite())
        throw std::runtime_error("plant: non-finite state derivative, aborting run");
    return next;
}

}  // namespace uam
