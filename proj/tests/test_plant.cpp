#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "uam/attitude.hpp"
#include "uam/disturbance.hpp"
#include "uam/plant.hpp"
#include "uam/trajectory.hpp"

using namespace uam;

namespace {

// hand-rolled cross product so the expression oracles share nothing with Eigen's
Vec3 xprod(const Vec3& a, const Vec3& b) {
    return Vec3(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
                a.x() * b.y() - a.y() * b.x());
}

UavState random_state(std::mt19937_64& rng) {
    UavState s;
    s.p = oracle::random_vec3(rng, -1., 1.);
    s.v = oracle::random_vec3(rng, -1., 1.);
    s.R = oracle::random_rotation(rng);
    s.omega = oracle::random_vec3(rng, -0.5, 0.5);
    s.omega_dot = oracle::random_vec3(rng, -0.5, 0.5);
    return s;
}

}  // namespace

TEST_CASE("coupling force") {
    PlantParams params;

    SECTION("level hover with frozen arms produces nothing") {
        UavState s;
        CHECK(coupling_force(params, s, Vec3(0.1, 0., -0.2), Vec3::Zero(), Vec3::Zero()).norm() ==
              0.);
    }

    SECTION("pure CoM acceleration passes straight through") {
        UavState s;
        const Vec3 f = coupling_force(params, s, Vec3(0.1, 0., -0.2), Vec3::Zero(),
                                      Vec3(0., 0., 0.7));
        CHECK((f - params.m_t * Vec3(0., 0., 0.7)).norm() < 1e-14);
    }

    SECTION("random inputs match the term-by-term oracle") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 200; ++i) {
            const UavState s = random_state(rng);
            const Vec3 r = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 rd = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 rdd = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 got = coupling_force(params, s, r, rd, rdd);
            const Vec3 want =
                params.m_t * (s.R * xprod(s.omega, xprod(s.omega, r))) +
                params.m_t *
                    (s.R * (xprod(s.omega_dot, r) + 2. * xprod(s.omega, rd) + rdd));
            CHECK((got - want).norm() < 1e-12);
        }
    }
}

TEST_CASE("compensable force") {
    PlantParams params;   // m_t = 4.85, g = 9.8

    SECTION("level hover equals the gravity feedforward") {
        UavState s;
        const Vec3 f = compensable_force(params, s, Vec3(0.05, 0., -0.1));
        CHECK((f - Vec3(0., 0., 47.53)).norm() < 1e-12);
    }

    SECTION("zero offset ignores body rates") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 20; ++i) {
            const UavState s = random_state(rng);
            const Vec3 f = compensable_force(params, s, Vec3::Zero());
            CHECK((f - Vec3(0., 0., params.m_t * params.g)).norm() < 1e-12);
        }
    }

    SECTION("random inputs match the expression oracle") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 200; ++i) {
            const UavState s = random_state(rng);
            const Vec3 r = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 want = Vec3(0., 0., params.m_t * params.g) +
                              params.m_t * (s.R * xprod(s.omega, xprod(s.omega, r)));
            CHECK((compensable_force(params, s, r) - want).norm() < 1e-12);
        }
    }
}

TEST_CASE("lumped uncertainty") {
    PlantParams params;

    SECTION("nothing unknown means zero") {
        UavState s;
        CHECK(lumped_uncertainty(params, s, Vec3::Zero(), Vec3(0.1, 0., 0.), Vec3::Zero(),
                                 Vec3::Zero())
                  .norm() == 0.);
    }

    SECTION("pure disturbance passes through") {
        UavState s;
        const Vec3 f = lumped_uncertainty(params, s, Vec3(1., 0., 0.), Vec3(0.1, 0., 0.),
                                          Vec3::Zero(), Vec3::Zero());
        CHECK((f - Vec3(1., 0., 0.)).norm() == 0.);
    }

    SECTION("force decomposition identity") {
        // F_m = (F_c - m g e3) + (F - F_d) for matching arguments
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            const UavState s = random_state(rng);
            const Vec3 r = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 rd = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 rdd = oracle::random_vec3(rng, -0.3, 0.3);
            const Vec3 Fd = oracle::random_vec3(rng, -2., 2.);
            const Vec3 Fm = coupling_force(params, s, r, rd, rdd);
            const Vec3 Fc = compensable_force(params, s, r);
            const Vec3 F = lumped_uncertainty(params, s, Fd, r, rd, rdd);
            const Vec3 lhs = Fm;
            const Vec3 rhs = (Fc - Vec3(0., 0., params.m_t * params.g)) + (F - Fd);
            CHECK((lhs - rhs).norm() < 1e-12 * std::max(1., lhs.norm()));
        }
    }
}

TEST_CASE("friction") {
    PlantParams params;
    CHECK(friction(params, Vec3::Zero()).norm() == 0.);

    params.friction_coeffs = Vec3(0.5, 0.5, 0.5);
    CHECK((friction(params, Vec3(2., 0., 0.)) - Vec3(1., 0., 0.)).norm() == 0.);

    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v = oracle::random_vec3(rng, -3., 3.);
        CHECK(v.dot(friction(params, v)) >= 0.);
    }
}

TEST_CASE("plant stepping") {
    PlantParams params;

    SECTION("dt bounds enforced") {
        UavState s;
        const SignalFn sig = [](double) { return PlantSignals{}; };
        CHECK_THROWS_AS(plant_step(s, params, Vec3::Zero(), sig, 0., 0.), std::invalid_argument);
        CHECK_THROWS_AS(plant_step(s, params, Vec3::Zero(), sig, 0., 0.02), std::invalid_argument);
        CHECK_THROWS_AS(plant_step(s, params, Vec3(std::nan(""), 0., 0.), sig, 0., 1e-3),
                        std::invalid_argument);
    }

    SECTION("force balance keeps velocity constant") {
        UavState s;
        s.v = Vec3(0.4, -0.2, 0.1);
        const Vec3 F(0.3, 0.1, -0.2);
        const SignalFn sig = [&](double) {
            PlantSignals x;
            x.F_d = F;
            return x;
        };
        const Vec3 U = friction(params, s.v) + F;
        UavState n = s;
        for (int i = 0; i < 100; ++i) n = plant_step(n, params, U, sig, i * 1e-3, 1e-3);
        CHECK((n.v - s.v).norm() < 1e-15);
    }

    SECTION("constant thrust integrates exactly") {
        PlantParams frictionless = params;
        frictionless.friction_coeffs = Vec3::Zero();
        UavState s;
        const SignalFn sig = [](double) { return PlantSignals{}; };
        const Vec3 U(0., 0., frictionless.m_t);   // 1 m/s^2 up
        for (int i = 0; i < 1000; ++i) s = plant_step(s, frictionless, U, sig, i * 1e-3, 1e-3);
        CHECK(std::abs(s.v.z() - 1.0) < 1e-9);
        CHECK(std::abs(s.p.z() - 0.5) < 1e-9);
    }

    SECTION("non-finite derivatives abort the step") {
        UavState s;
        const SignalFn sig = [](double) {
            PlantSignals x;
            x.F_d = Vec3(std::numeric_limits<double>::infinity(), 0., 0.);
            return x;
        };
        CHECK_THROWS_AS(plant_step(s, params, Vec3::Zero(), sig, 0., 1e-3), std::runtime_error);
    }
}

TEST_CASE("integrator order via Richardson ratio") {
    // forced run: constant virtual input, smooth time-varying disturbance,
    // attitude and arm-driven CoM signals evaluated at the stage times
    PlantParams params;
    const ArmGeometry geom = ArmGeometry::standard();
    const JointSchedule sched = JointSchedule::periodic();
    const AttitudeSource att =
        AttitudeSource::sinusoid(Vec3(0.08, 0.06, 0.04), Vec3(0.4, 0.5, 0.3));
    const SignalFn sig = [&](double t) {
        PlantSignals s;
        const AttitudeSample a = att.at(t);
        s.R = a.R;
        s.omega = a.omega;
        s.omega_dot = a.omega_dot;
        const JointState js = joint_schedule(t, sched);
        const ComState com = dual_arm_com(geom, js, js);
        s.r_oc = com.r;
        s.r_oc_dot = com.r_dot;
        s.r_oc_ddot = com.r_ddot;
        s.F_d = Vec3(0.8 * std::sin(2.1 * t), 0.6 * std::cos(1.7 * t), 0.5 * std::sin(2.9 * t));
        return s;
    };
    const Vec3 U(0.4, -0.3, 0.2);

    const auto endpoint = [&](double dt) {
        UavState s;
        s.v = Vec3(0.1, 0., -0.05);
        const long n = std::lround(10. / dt);
        for (long i = 0; i < n; ++i) s = plant_step(s, params, U, sig, i * dt, dt);
        return s.p;
    };

    const Vec3 pa = endpoint(0.01), pb = endpoint(0.005), pc = endpoint(0.0025);
    const double ratio = (pa - pb).norm() / (pb - pc).norm();
    CHECK(ratio > 12.8);
    CHECK(ratio < 19.2);
}

TEST_CASE("attitude sources emit consistent triples") {
    const AttitudeSource att =
        AttitudeSource::sinusoid(Vec3(0.1, 0.08, 0.05), Vec3(0.2, 0.31, 0.17), Vec3(0., 1., 2.));

    SECTION("zero mode") {
        const AttitudeSample s = AttitudeSource::zero().at(3.);
        CHECK((s.R - Mat3::Identity()).norm() == 0.);
        CHECK(s.omega.norm() == 0.);
    }

    SECTION("rotation stays orthonormal") {
        for (double t = 0.; t < 12.; t += 0.7)
            CHECK(orthonormality_defect(att.at(t).R) < 1e-12);
    }

    SECTION("omega_dot is the derivative of omega") {
        const auto w = [&](double t) { return Vec3(att.at(t).omega); };
        double worst = 0.;
        for (double t = 0.1; t < 10.; t += 0.37)
            worst = std::max(worst, (att.at(t).omega_dot - oracle::central_diff(w, t, 1e-6)).norm());
        CHECK(worst < 1e-8);
    }

    SECTION("integrating skew(omega) reproduces the emitted rotations") {
        // RK4 on Rdot = R skew(w) over 10 s
        Mat3 R = att.at(0.).R;
        const double dt = 1e-3;
        const auto deriv = [&](const Mat3& Rc, double t) -> Mat3 {
            return Rc * skew(att.at(t).omega);
        };
        for (long i = 0; i < 10000; ++i) {
            const double t = i * dt;
            const Mat3 k1 = deriv(R, t);
            const Mat3 k2 = deriv(R + 0.5 * dt * k1, t + 0.5 * dt);
            const Mat3 k3 = deriv(R + 0.5 * dt * k2, t + 0.5 * dt);
            const Mat3 k4 = deriv(R + dt * k3, t + dt);
            R += dt / 6. * (k1 + 2. * k2 + 2. * k3 + k4);
        }
        CHECK((R - att.at(10.).R).norm() < 1e-6);
    }

    SECTION("file replay reproduces the generating signal at the knots") {
        const std::string path = "attitude_replay_test.txt";
        {
            std::ofstream out(path);
            out << "# t roll pitch yaw droll dpitch dyaw\n";
            for (int i = 0; i <= 200; ++i) {
                const double t = i * 0.05;
                using std::numbers::pi;
                const Vec3 amp(0.1, 0.08, 0.05), f(0.2, 0.31, 0.17), ph(0., 1., 2.);
                char buf[256];
                std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", t,
                              amp[0] * std::sin(2. * pi * f[0] * t + ph[0]),
                              amp[1] * std::sin(2. * pi * f[1] * t + ph[1]),
                              amp[2] * std::sin(2. * pi * f[2] * t + ph[2]),
                              amp[0] * 2. * pi * f[0] * std::cos(2. * pi * f[0] * t + ph[0]),
                              amp[1] * 2. * pi * f[1] * std::cos(2. * pi * f[1] * t + ph[1]),
                              amp[2] * 2. * pi * f[2] * std::cos(2. * pi * f[2] * t + ph[2]));
                out << buf;
            }
        }
        const AttitudeSource replay = AttitudeSource::replay(path);
        for (double t : {0.05, 1.0, 5.55, 9.9})
            CHECK((replay.at(t).R - att.at(t).R).norm() < 1e-9);
        // interpolated rate stays the derivative of the interpolated angle
        const auto w = [&](double t) { return Vec3(replay.at(t).omega); };
        const double t_mid = 1.234;   // off the knot grid
        CHECK((replay.at(t_mid).omega_dot - oracle::central_diff(w, t_mid, 1e-6)).norm() < 1e-6);
        std::remove(path.c_str());
    }
}

TEST_CASE("disturbance profiles") {
    SECTION("step events ramp smoothly") {
        DisturbanceProfile d;
        d.kind = DisturbanceProfile::Kind::step;
        d.amplitude = Vec3(2., 0., 0.);
        d.event_times = {1.0};
        d.ramp = 0.2;
        d.validate();
        CHECK(d.force(0.9).norm() == 0.);
        CHECK((d.force(1.3) - Vec3(2., 0., 0.)).norm() < 1e-12);
        // continuous through the ramp
        const auto f = [&](double t) { return Vec3(d.force(t)); };
        CHECK((f(1.1) - f(1.1 - 1e-9)).norm() < 1e-6);
        // toggles off at a second event
        d.event_times = {1.0, 2.0};
        d.validate();
        CHECK(d.force(3.).norm() < 1e-12);
    }

    SECTION("payload weight rises and falls with analytic derivatives") {
        DisturbanceProfile d;
        d.kind = DisturbanceProfile::Kind::payload_event;
        d.event_times = {3., 15.};
        d.validate();
        double w, wd, wdd;
        d.payload_weight(2.5, w, wd, wdd);
        CHECK(w == 0.);
        d.payload_weight(5., w, wd, wdd);
        CHECK(w == 1.);
        CHECK(wd == 0.);
        d.payload_weight(16., w, wd, wdd);
        CHECK(w == 0.);

        const auto wf = [&](double t) {
            double a, b, c;
            d.payload_weight(t, a, b, c);
            return a;
        };
        for (double t : {3.05, 3.12, 15.08}) {
            d.payload_weight(t, w, wd, wdd);
            CHECK(wd == Catch::Approx(oracle::central_diff(wf, t, 1e-7)).margin(1e-6));
        }
        CHECK(d.force(10.).norm() == 0.);
    }

    SECTION("validation rejects bad event lists") {
        DisturbanceProfile d;
        d.kind = DisturbanceProfile::Kind::payload_event;
        d.event_times = {5., 2.};
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
        d.event_times = {5.};
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
        d.kind = DisturbanceProfile::Kind::step;
        d.event_times = {1.};
        d.ramp = 0.;
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    }
}
