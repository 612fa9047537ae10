#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uam/core.hpp"

namespace uam {

/// One standard DH row: A = RotZ(theta+theta_offset) TransZ(d) TransX(a) RotX(alpha).
struct DhRow {
    double a = 0.;
    double alpha = 0.;
    double d = 0.;
    double theta_offset = 0.;
};

enum class ArmSide { right, left };

/// Geometry and mass model of one 3-DOF arm (shoulder pitch, elbow pitch,
/// elbow roll, plus a claw treated as a point mass at the tool point).
///
/// Conventions, fixed here and used throughout:
///  - body frame: x forward, y left, z up; arms mounted below the body
///    origin at mount_offset (right arm; left arm at the y-mirrored point);
///  - the DH base frame has z along body-y (both pitch axes), x along
///    body-x, so at eta = 0 the arm points straight out along body-x and
///    positive pitch swings it downward;
///  - the elbow-roll axis runs along the forearm, so the default chain is
///    row 1 (a=L1), row 2 (pure reorientation, alpha=pi/2 with a +pi/2
///    theta offset), row 3 (d=L2+L3 along the roll axis);
///  - the left arm is the y-mirror image of the right arm: positions map
///    through M = diag(1,-1,1), orientations through M*Phi*M.
struct ArmGeometry {
    double L1 = 0.15, L2 = 0.05, L3 = 0.17;                              // m
    double m_shoulder = 0.165, m_elbow_pitch = 0.082, m_elbow_roll = 0.082,
           m_claw = 0.0546;                                              // kg
    std::array<DhRow, 3> dh{};
    Vec3 mount_offset{0., 0.08, -0.10};    // right-arm base in body frame
    bool mirror = true;
    double joint_limit = std::numbers::pi;   // rad, symmetric

    static ArmGeometry standard() {
        ArmGeometry g;
        g.set_default_dh();
        g.validate();
        return g;
    }

    void set_default_dh() {
        dh[0] = {L1, 0., 0., 0.};
        dh[1] = {0., std::numbers::pi / 2., 0., std::numbers::pi / 2.};
        dh[2] = {0., 0., L2 + L3, 0.};
    }

    void validate() const {
        if (!(L1 > 0. && L2 > 0. && L3 > 0.))
            throw std::invalid_argument("arm geometry: link lengths must be positive");
        if (!(m_shoulder > 0. && m_elbow_pitch > 0. && m_elbow_roll > 0. && m_claw > 0.))
            throw std::invalid_argument("arm geometry: joint masses must be positive");
        if (!(joint_limit > 0.))
            throw std::invalid_argument("arm geometry: joint limit must be positive");
        if (!mount_offset.allFinite())
            throw std::invalid_argument("arm geometry: mount offset must be finite");
    }

    double arm_mass() const { return m_shoulder + m_elbow_pitch + m_elbow_roll + m_claw; }

    /// Base orientation of the DH chain in the body frame: columns are
    /// (x_body, -z_body, y_body), i.e. joint-1 rotates about body-y.
    static Mat3 mount_rotation() {
        Mat3 r;
        r << 1., 0., 0.,
             0., 0., 1.,
             0., -1., 0.;
        return r;
    }
};

/// Position and orientation of a frame.
struct Pose {
    Vec3 position = Vec3::Zero();
    Mat3 orientation = Mat3::Identity();
};

/// Kinematic state of one chain frame, everything in the body frame:
/// pose, angular velocity/acceleration, origin velocity/acceleration.
struct FrameKin {
    Mat3 R = Mat3::Identity();
    Vec3 o = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    Vec3 alpha = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 a = Vec3::Zero();
};

struct PointState {
    Vec3 p = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 a = Vec3::Zero();
};

namespace detail {

inline void check_joint_vector(const ArmGeometry& g, const Vec3& eta) {
    if (!eta.allFinite()) throw std::invalid_argument("kinematics: non-finite joint vector");
    for (int i = 0; i < 3; ++i)
        if (std::abs(eta[i]) > g.joint_limit + 1e-12)
            throw std::invalid_argument("kinematics: joint angle exceeds configured limit");
}

/// Walks the right-arm chain with full first/second order kinematics.
/// frames[0] is the mount, frames[i] the frame after DH row i.
inline std::array<FrameKin, 4> arm_chain(const ArmGeometry& g, const JointState& js) {
    check_joint_vector(g, js.eta);
    require_finite(js.eta_dot, "joint rates");
    require_finite(js.eta_ddot, "joint accelerations");

    std::array<FrameKin, 4> f{};
    f[0].R = ArmGeometry::mount_rotation();
    f[0].o = g.mount_offset;

    for (int i = 0; i < 3; ++i) {
        const DhRow& row = g.dh[i];
        const FrameKin& prev = f[i];
        const double theta = js.eta[i] + row.theta_offset;

        const Vec3 k = prev.R.col(2);   // joint axis in body frame
        FrameKin next;
        next.omega = prev.omega + k * js.eta_dot[i];
        next.alpha = prev.alpha + k * js.eta_ddot[i] + prev.omega.cross(k) * js.eta_dot[i];

        // link offset, rigidly attached to the new frame
        const Vec3 r = prev.R * (rot_z(theta) * Vec3(row.a, 0., row.d));
        next.o = prev.o + r;
        next.v = prev.v + next.omega.cross(r);
        next.a = prev.a + next.alpha.cross(r) + next.omega.cross(next.omega.cross(r));
        next.R = prev.R * rot_z(theta) * rot_x(row.alpha);
        f[i + 1] = next;
    }
    return f;
}

/// State of a point rigidly attached to chain frame `idx` at local offset c.
inline PointState attached_point(const FrameKin& fr, const Vec3& c) {
    const Vec3 arm = fr.R * c;
    PointState p;
    p.p = fr.o + arm;
    p.v = fr.v + fr.omega.cross(arm);
    p.a = fr.a + fr.alpha.cross(arm) + fr.omega.cross(fr.omega.cross(arm));
    return p;
}

inline Mat3 mirror_y() { return Vec3(1., -1., 1.).asDiagonal(); }

}  // namespace detail

/// Body-frame pose of the requested arm's end-effector.
inline Pose forward_kinematics(const ArmGeometry& g, const Vec3& eta, ArmSide side) {
    const auto frames = detail::arm_chain(g, JointState{eta, Vec3::Zero(), Vec3::Zero()});
    Pose pose{frames[3].o, frames[3].R};
    if (side == ArmSide::left) {
        const Mat3 m = detail::mirror_y();
        pose.position = m * pose.position;
        pose.orientation = m * pose.orientation * m;
    }
    return pose;
}

/// Maps a body-frame pose into the world frame through the multirotor pose.
inline Pose world_pose(const UavState& uav, const Pose& body_pose) {
    if (orthonormality_defect(uav.R) > 1e-6)
        throw std::invalid_argument("world_pose: uav rotation is not orthonormal");
    return Pose{uav.p + uav.R * body_pose.position, uav.R * body_pose.orientation};
}

/// Geometric Jacobian: stacks body-frame end-effector linear and angular
/// velocity over the joint rates, 6x3 with the linear block on top.
inline Mat6x3 jacobian(const ArmGeometry& g, const Vec3& eta, ArmSide side = ArmSide::right) {
    const auto frames = detail::arm_chain(g, JointState{eta, Vec3::Zero(), Vec3::Zero()});
    const Vec3 pe = frames[3].o;
    Mat6x3 J;
    for (int i = 0; i < 3; ++i) {
        const Vec3 axis = frames[i].R.col(2);
        J.col(i).head<3>() = axis.cross(pe - frames[i].o);
        J.col(i).tail<3>() = axis;
    }
    if (side == ArmSide::left) {
        const Mat3 m = detail::mirror_y();
        J.topRows<3>() = m * J.topRows<3>();
        J.bottomRows<3>() = -m * J.bottomRows<3>();
    }
    return J;
}

/// World-frame end-effector velocity (linear, angular).
inline std::pair<Vec3, Vec3> end_effector_velocity(const UavState& uav, const ArmGeometry& g,
                                                   const Vec3& eta, const Vec3& eta_dot,
                                                   ArmSide side = ArmSide::right) {
    require_finite(eta_dot, "joint rates");
    const Pose body = forward_kinematics(g, eta, side);
    const Mat6x3 J = jacobian(g, eta, side);
    const Eigen::Matrix<double, 6, 1> twist = J * eta_dot;
    const Vec3 v_rel = twist.head<3>(), w_rel = twist.tail<3>();
    const Vec3 v_e = uav.v + uav.R * (uav.omega.cross(body.position) + v_rel);
    const Vec3 w_e = uav.R * (uav.omega + w_rel);
    return {v_e, w_e};
}

/// Center of mass of the dual-arm assembly in the body frame, with exact
/// analytic time derivatives.
struct ComState {
    Vec3 r = Vec3::Zero();
    Vec3 r_dot = Vec3::Zero();
    Vec3 r_ddot = Vec3::Zero();
    double mass = 0.;   // kg, total of the aggregated points
};

namespace detail {

/// Point-mass locations of one arm chain: servo bodies at the shoulder,
/// elbow and along the forearm (L2 from the elbow), claw at the tool point.
inline std::array<PointState, 4> arm_mass_points(const ArmGeometry& g, const JointState& js) {
    const auto fr = arm_chain(g, js);
    return {attached_point(fr[0], Vec3::Zero()), attached_point(fr[1], Vec3::Zero()),
            attached_point(fr[2], Vec3(0., 0., g.L2)), attached_point(fr[3], Vec3::Zero())};
}

inline void mirror_points(std::array<PointState, 4>& pts) {
    const Mat3 m = mirror_y();
    for (auto& p : pts) {
        p.p = m * p.p;
        p.v = m * p.v;
        p.a = m * p.a;
    }
}

}  // namespace detail

inline ComState dual_arm_com(const ArmGeometry& g, const JointState& right,
                             const JointState& left) {
    g.validate();
    auto pr = detail::arm_mass_points(g, right);
    auto pl = detail::arm_mass_points(g, left);
    detail::mirror_points(pl);

    const std::array<double, 4> masses{g.m_shoulder, g.m_elbow_pitch, g.m_elbow_roll, g.m_claw};
    ComState c;
    for (int i = 0; i < 4; ++i) {
        c.r += masses[i] * (pr[i].p + pl[i].p);
        c.r_dot += masses[i] * (pr[i].v + pl[i].v);
        c.r_ddot += masses[i] * (pr[i].a + pl[i].a);
    }
    c.mass = 2. * g.arm_mass();
    c.r /= c.mass;
    c.r_dot /= c.mass;
    c.r_ddot /= c.mass;
    return c;
}

inline Vec3 com_offset(const ArmGeometry& g, const Vec3& eta_right, const Vec3& eta_left) {
    return dual_arm_com(g, JointState{eta_right, Vec3::Zero(), Vec3::Zero()},
                        JointState{eta_left, Vec3::Zero(), Vec3::Zero()})
        .r;
}

inline std::pair<Vec3, Vec3> com_derivatives(const ArmGeometry& g, const JointState& right,
                                             const JointState& left) {
    const ComState c = dual_arm_com(g, right, left);
    return {c.r_dot, c.r_ddot};
}

/// Midpoint between the two claws: where a rod load held by both arms sits.
inline PointState claw_midpoint_state(const ArmGeometry& g, const JointState& right,
                                      const JointState& left) {
    auto fr = detail::arm_chain(g, right);
    auto fl = detail::arm_chain(g, left);
    const PointState r = detail::attached_point(fr[3], Vec3::Zero());
    PointState l = detail::attached_point(fl[3], Vec3::Zero());
    const Mat3 m = detail::mirror_y();
    l.p = m * l.p;
    l.v = m * l.v;
    l.a = m * l.a;
    return {0.5 * (r.p + l.p), 0.5 * (r.v + l.v), 0.5 * (r.a + l.a)};
}

/// Aggregates the arm CoM with a payload point mass whose attachment weight
/// w(t) in [0,1] ramps smoothly; exact quotient-rule derivatives.
inline ComState com_with_payload(const ComState& arms, const PointState& payload,
                                 double payload_mass, double w, double w_dot, double w_ddot) {
    if (payload_mass < 0.) throw std::invalid_argument("payload mass must be non-negative");
    const double mw = payload_mass * w;
    const double D = arms.mass + mw;
    const double D1 = payload_mass * w_dot;
    const double D2 = payload_mass * w_ddot;

    const Vec3 N = arms.mass * arms.r + mw * payload.p;
    const Vec3 N1 = arms.mass * arms.r_dot + payload_mass * (w_dot * payload.p + w * payload.v);
    const Vec3 N2 = arms.mass * arms.r_ddot +
                    payload_mass * (w_ddot * payload.p + 2. * w_dot * payload.v + w * payload.a);

    ComState out;
    out.mass = D;
    out.r = N / D;
    out.r_dot = (N1 - out.r * D1) / D;
    out.r_ddot = (N2 - 2. * out.r_dot * D1 - out.r * D2) / D;
    return out;
}

}  // namespace uam
