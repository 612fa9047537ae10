#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uam/core.hpp"

namespace uam {

/// Reference sample with analytic derivatives up to jerk.
struct TrajectorySample {
    double t = 0.;
    Vec3 p = Vec3::Zero();      // m
    Vec3 v = Vec3::Zero();      // m/s
    Vec3 a = Vec3::Zero();      // m/s^2
    Vec3 j = Vec3::Zero();      // m/s^3
};

namespace detail {

// x(t) = off + amp*sin(w t + ph), all four derivative orders
inline void sinusoid(double t, double amp, double w, double ph, double off,
                     double& x, double& x1, double& x2, double& x3) {
    const double s = std::sin(w * t + ph), c = std::cos(w * t + ph);
    x  = off + amp * s;
    x1 = amp * w * c;
    x2 = -amp * w * w * s;
    x3 = -amp * w * w * w * c;
}

}  // namespace detail

inline TrajectorySample figure_eight(double t) {
    using std::numbers::pi;
    TrajectorySample s;
    s.t = t;
    detail::sinusoid(t, 0.5, pi / 10., 0., 0., s.p.x(), s.v.x(), s.a.x(), s.j.x());
    detail::sinusoid(t, 1.0, pi / 20., pi, 0., s.p.y(), s.v.y(), s.a.y(), s.j.y());
    detail::sinusoid(t, 0.1, pi / 20., pi, 0.65, s.p.z(), s.v.z(), s.a.z(), s.j.z());
    return s;
}

inline TrajectorySample spiral(double t) {
    using std::numbers::pi;
    TrajectorySample s;
    s.t = t;

    // radius grows affinely: rho = (t+5)/80
    const double rho = (t + 5.) / 80., rho1 = 1. / 80.;
    const double w = pi / 20.;
    const double arg = w * t + pi / 4.;
    const double sa = std::sin(arg), ca = std::cos(arg);

    s.p.x() = rho * sa;
    s.v.x() = rho1 * sa + rho * w * ca;
    s.a.x() = 2. * rho1 * w * ca - rho * w * w * sa;
    s.j.x() = -3. * rho1 * w * w * sa - rho * w * w * w * ca;

    s.p.y() = rho * ca;
    s.v.y() = rho1 * ca - rho * w * sa;
    s.a.y() = -2. * rho1 * w * sa - rho * w * w * ca;
    s.j.y() = -3. * rho1 * w * w * ca + rho * w * w * w * sa;

    detail::sinusoid(t, 0.1, pi / 10., pi / 2., 0.65, s.p.z(), s.v.z(), s.a.z(), s.j.z());
    return s;
}

/// Waypoint mission for the pick-and-deliver scenario: hold at the start
/// point, transfer between the pickup and release instants, hold at the
/// target. Blends use the C3 smoothstep so jerk stays continuous at the
/// segment joints; an optional climb above the endpoints is shaped by a
/// polynomial bump in the blend parameter.
struct DeliveryConfig {
    Vec3 start{0., 0., 0.65};
    Vec3 target{1., 0., 0.65};
    double cruise_height = 0.65;
    double pickup_time = 3.;
    double release_time = 15.;

    void validate() const {
        if (!(release_time > pickup_time) || pickup_time < 0.)
            throw std::invalid_argument("delivery: event times must satisfy 0 <= pickup < release");
    }
};

inline TrajectorySample delivery_mission(double t, const DeliveryConfig& cfg) {
    cfg.validate();
    TrajectorySample s;
    s.t = t;
    if (t <= cfg.pickup_time) {
        s.p = cfg.start;
        return s;
    }
    if (t >= cfg.release_time) {
        s.p = cfg.target;
        return s;
    }
    const double T = cfg.release_time - cfg.pickup_time;
    const double tau = (t - cfg.pickup_time) / T;
    const SmoothStep b = smoothstep_c3(tau);
    const Vec3 d = cfg.target - cfg.start;
    s.p = cfg.start + d * b.s;
    s.v = d * (b.s1 / T);
    s.a = d * (b.s2 / (T * T));
    s.j = d * (b.s3 / (T * T * T));

    const double lift = cfg.cruise_height - std::max(cfg.start.z(), cfg.target.z());
    if (lift > 0.) {
        // bump(s) = 16 s^2 (1-s)^2 peaks at 1 for s = 1/2; composed with the
        // C3 blend it keeps the same smoothness class.
        const double u = b.s;
        const double g = 16. * u * u * (1. - u) * (1. - u);
        const double g1 = 32. * u * (1. - u) * (1. - 2. * u);
        const double g2 = 32. * (1. - 6. * u + 6. * u * u);
        const double g3 = 32. * (-6. + 12. * u);
        const double u1 = b.s1 / T, u2 = b.s2 / (T * T), u3 = b.s3 / (T * T * T);
        s.p.z() += lift * g;
        s.v.z() += lift * g1 * u1;
        s.a.z() += lift * (g2 * u1 * u1 + g1 * u2);
        s.j.z() += lift * (g3 * u1 * u1 * u1 + 3. * g2 * u1 * u2 + g1 * u3);
    }
    return s;
}

/// One joint angle trace: eta(t) = offset + amplitude*sin(2*pi*f*t + phase).
struct JointSinusoid {
    double amplitude = 0.;   // rad
    double frequency_hz = 0.;
    double phase = 0.;
    double offset = 0.;
};

/// Joint-angle schedule for both arms. Two modes: periodic sinusoids
/// (tracking experiments) and waypoint holds with smooth transitions
/// (grasp/release poses in the delivery scenario). The left arm follows the
/// same schedule; the mirror convention in the kinematics maps it to the
/// opposite side.
struct JointSchedule {
    enum class Mode { sinusoid, waypoints };
    Mode mode = Mode::sinusoid;

    std::array<JointSinusoid, 3> joints{};   // sinusoid mode

    struct Waypoint {
        double t_start = 0.;    // blend begins here
        double duration = 1.;   // seconds to reach the pose
        Vec3 pose = Vec3::Zero();
    };
    Vec3 initial_pose = Vec3::Zero();
    std::vector<Waypoint> waypoints;         // waypoint mode, sorted

    void validate() const {
        double prev_end = 0.;
        for (const auto& w : waypoints) {
            if (w.duration <= 0.)
                throw std::invalid_argument("joint schedule: blend duration must be positive");
            if (w.t_start < prev_end)
                throw std::invalid_argument("joint schedule: overlapping or unordered waypoints");
            prev_end = w.t_start + w.duration;
        }
    }

    /// Default periodic motion: comparable excursions on all three joints
    /// with the 20 s period of the tracking references.
    static JointSchedule periodic() {
        JointSchedule s;
        s.joints[0] = {0.5, 1. / 20., 0., 0.};
        s.joints[1] = {0.4, 1. / 20., std::numbers::pi / 2., 0.};
        s.joints[2] = {0.3, 1. / 20., 0., 0.};
        return s;
    }

    static JointSchedule frozen(const Vec3& pose = Vec3::Zero()) {
        JointSchedule s;
        s.mode = Mode::waypoints;
        s.initial_pose = pose;
        return s;
    }

    /// Stow -> grasp before pickup, hold while carrying, stow after release.
    static JointSchedule delivery(double pickup_time, double release_time) {
        JointSchedule s;
        s.mode = Mode::waypoints;
        s.initial_pose = Vec3(0.3, 0.2, 0.);
        const double lead = std::min(1., pickup_time);
        s.waypoints.push_back({pickup_time - lead, lead, Vec3(0.6, 0.4, 0.)});
        s.waypoints.push_back({release_time, 1., Vec3(0.3, 0.2, 0.)});
        s.validate();
        return s;
    }
};

inline JointState joint_schedule(double t, const JointSchedule& s) {
    JointState r;
    if (s.mode == JointSchedule::Mode::sinusoid) {
        using std::numbers::pi;
        for (int i = 0; i < 3; ++i) {
            const auto& js = s.joints[i];
            double dummy3;
            detail::sinusoid(t, js.amplitude, 2. * pi * js.frequency_hz, js.phase, js.offset,
                             r.eta[i], r.eta_dot[i], r.eta_ddot[i], dummy3);
        }
        return r;
    }
    s.validate();
    Vec3 pose = s.initial_pose;
    for (const auto& w : s.waypoints) {
        if (t <= w.t_start) break;
        if (t >= w.t_start + w.duration) {
            pose = w.pose;
            continue;
        }
        const double tau = (t - w.t_start) / w.duration;
        const SmoothStep b = smoothstep_c3(tau);
        const Vec3 d = w.pose - pose;
        r.eta = pose + d * b.s;
        r.eta_dot = d * (b.s1 / w.duration);
        r.eta_ddot = d * (b.s2 / (w.duration * w.duration));
        return r;
    }
    r.eta = pose;
    return r;
}

}  // namespace uam
