#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6x3 = Eigen::Matrix<double, 6, 3>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

inline Mat3 skew(const Vec3& a) {
    Mat3 s;
    s <<    0., -a.z(),  a.y(),
         a.z(),     0., -a.x(),
        -a.y(),  a.x(),     0.;
    return s;
}

inline Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << 1., 0., 0.,
         0.,  c, -s,
         0.,  s,  c;
    return r;
}

inline Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r <<  c, 0., s,
         0., 1., 0.,
         -s, 0., c;
    return r;
}

inline Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, -s, 0.,
         s,  c, 0.,
         0., 0., 1.;
    return r;
}

/// Elementwise signum with sgn(0) = 0.
inline double sgn(double x) { return x > 0. ? 1. : (x < 0. ? -1. : 0.); }

inline Vec3 sgn(const Vec3& v) { return Vec3(sgn(v.x()), sgn(v.y()), sgn(v.z())); }

inline bool all_finite(const Vec3& v) { return v.allFinite(); }
inline bool all_finite(const Mat3& m) { return m.allFinite(); }

/// Frobenius distance of R'R from identity; 0 for exact rotations.
inline double orthonormality_defect(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).norm();
}

inline void require_finite(const Vec3& v, const char* what) {
    if (!v.allFinite())
        throw std::invalid_argument(std::string("non-finite ") + what);
}

/// Joint position/velocity/acceleration of one 3-DOF arm.
struct JointState {
    Vec3 eta = Vec3::Zero();        // rad
    Vec3 eta_dot = Vec3::Zero();    // rad/s
    Vec3 eta_ddot = Vec3::Zero();   // rad/s^2
};

/// Multirotor translational state plus the attitude signals the coupled
/// dynamics read (R world-from-body, rates in body frame).
struct UavState {
    Vec3 p = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Mat3 R = Mat3::Identity();
    Vec3 omega = Vec3::Zero();
    Vec3 omega_dot = Vec3::Zero();
};

/// C3 smoothstep on [0,1]: value and first three derivatives vanish
/// at both ends (first three derivatives, that is; value goes 0 -> 1).
struct SmoothStep {
    double s;    // value
    double s1;   // d/dtau
    double s2;   // d2/dtau2
    double s3;   // d3/dtau3
};

inline SmoothStep smoothstep_c3(double tau) {
    if (tau <= 0.) return {0., 0., 0., 0.};
    if (tau >= 1.) return {1., 0., 0., 0.};
    const double t = tau, t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, t6 = t5 * t, t7 = t6 * t;
    SmoothStep out;
    out.s  = 35. * t4 - 84. * t5 + 70. * t6 - 20. * t7;
    out.s1 = 140. * t3 - 420. * t4 + 420. * t5 - 140. * t6;
    out.s2 = 420. * t2 - 1680. * t3 + 2100. * t4 - 840. * t5;
    out.s3 = 840. * t - 5040. * t2 + 8400. * t3 - 4200. * t4;
    return out;
}

}  // namespace uam
