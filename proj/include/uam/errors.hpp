#pragma once

#include "uam/core.hpp"
#include "uam/trajectory.hpp"

namespace uam {

/// Tracking-error cascade. r is diagnostic only: it needs an acceleration
/// estimate, which the simulator has exactly but the control law never reads.
struct ErrorState {
    Vec3 e1 = Vec3::Zero();       // p - p_d
    Vec3 e1_dot = Vec3::Zero();   // v - v_d
    Vec3 e2 = Vec3::Zero();       // e1_dot + k1 e1
    Vec3 e2_dot = Vec3::Zero();   // (a - a_d) + k1 e1_dot
    Vec3 r = Vec3::Zero();        // e2_dot + k2 e2

    Vec9 z() const {
        Vec9 out;
        out << e1, e2, r;
        return out;
    }
};

inline ErrorState compute_errors(const Vec3& p, const Vec3& v, const Vec3& a_est,
                                 const TrajectorySample& traj, double k1, double k2) {
    ErrorState e;
    e.e1 = p - traj.p;
    e.e1_dot = v - traj.v;
    e.e2 = e.e1_dot + k1 * e.e1;
    e.e2_dot = (a_est - traj.a) + k1 * e.e1_dot;
    e.r = e.e2_dot + k2 * e.e2;
    return e;
}

/// Inputs for the open-loop residual check on one logged sample.
struct OpenLoopSample {
    double mass = 0.;               // effective total mass used by the plant
    Vec3 friction_coeffs = Vec3::Zero();
    double k1 = 0., k2 = 0.;
    Vec3 e1, e2, r;
    Vec3 v;          // measured p_dot
    Vec3 v_d, a_d;   // trajectory derivatives
    Vec3 F;          // lumped uncertainty as applied by the plant
    Vec3 U;          // virtual input as applied by the plant
};

/// Residual of the open-loop error dynamics
///   m r = -m a_d - f_d + S - F + U
/// with f_d = F_f(v_d) and S = m(k1 e1_dot + k2 e2) - F_f(v) + F_f(v_d).
/// Zero (to rounding) on any consistently logged sample; a growing value
/// flags bookkeeping mistakes between the plant and the logger.
inline Vec3 open_loop_residual(const OpenLoopSample& s) {
    const auto ff = [&](const Vec3& vel) { return s.friction_coeffs.cwiseProduct(vel); };
    const Vec3 e1_dot = s.e2 - s.k1 * s.e1;
    const Vec3 f_d = ff(s.v_d);
    const Vec3 S = s.mass * (s.k1 * e1_dot + s.k2 * s.e2) - ff(s.v) + ff(s.v_d);
    return s.mass * s.r - (-s.mass * s.a_d - f_d + S - s.F + s.U);
}

}  // namespace uam
