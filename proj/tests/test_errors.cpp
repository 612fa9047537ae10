#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/oracles.hpp"
#include "uam/errors.hpp"
#include "uam/trajectory.hpp"

using namespace uam;

TEST_CASE("error cascade") {
    const TrajectorySample traj = figure_eight(2.7);

    SECTION("perfect tracking zeroes everything") {
        const ErrorState e = compute_errors(traj.p, traj.v, traj.a, traj, 0.69, 0.5);
        CHECK(e.e1.norm() == 0.);
        CHECK(e.e2.norm() == 0.);
        CHECK(e.r.norm() == 0.);
        CHECK(e.z().norm() == 0.);
    }

    SECTION("k1 scales the position error into e2") {
        const ErrorState e =
            compute_errors(traj.p + Vec3(1., 0., 0.), traj.v, traj.a, traj, 0.69, 0.5);
        CHECK((e.e2 - Vec3(0.69, 0., 0.)).norm() < 1e-15);
    }

    SECTION("cascade definitions hold for arbitrary states") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 50; ++i) {
            const Vec3 p = oracle::random_vec3(rng, -1., 1.);
            const Vec3 v = oracle::random_vec3(rng, -1., 1.);
            const Vec3 a = oracle::random_vec3(rng, -1., 1.);
            const ErrorState e = compute_errors(p, v, a, traj, 0.69, 0.5);
            CHECK((e.e2 - (e.e1_dot + 0.69 * e.e1)).norm() == 0.);
            CHECK((e.r - (e.e2_dot + 0.5 * e.e2)).norm() == 0.);
        }
    }
}

TEST_CASE("open-loop residual") {
    // Build consistent samples: pick everything else at random, then set r
    // from the model; the residual of such a sample must vanish.
    std::mt19937_64 rng(17);
    const double k1 = 0.69, k2 = 0.5, m = 4.85;
    const Vec3 c(0.25, 0.25, 0.25);

    const auto consistent_sample = [&]() {
        OpenLoopSample s;
        s.mass = m;
        s.friction_coeffs = c;
        s.k1 = k1;
        s.k2 = k2;
        s.e1 = oracle::random_vec3(rng, -0.5, 0.5);
        s.e2 = oracle::random_vec3(rng, -0.5, 0.5);
        s.v = oracle::random_vec3(rng, -1., 1.);
        s.v_d = oracle::random_vec3(rng, -1., 1.);
        s.a_d = oracle::random_vec3(rng, -1., 1.);
        s.F = oracle::random_vec3(rng, -2., 2.);
        s.U = oracle::random_vec3(rng, -5., 5.);
        const Vec3 e1_dot = s.e2 - k1 * s.e1;
        const Vec3 f_d = c.cwiseProduct(s.v_d);
        const Vec3 S = m * (k1 * e1_dot + k2 * s.e2) - c.cwiseProduct(s.v) + c.cwiseProduct(s.v_d);
        s.r = (-m * s.a_d - f_d + S - s.F + s.U) / m;
        return s;
    };

    SECTION("consistent samples give a vanishing residual") {
        for (int i = 0; i < 100; ++i) {
            const OpenLoopSample s = consistent_sample();
            CHECK(open_loop_residual(s).norm() < 1e-12);
        }
    }

    SECTION("zero state, zero trajectory") {
        OpenLoopSample s;
        s.mass = m;
        s.friction_coeffs = c;
        s.k1 = k1;
        s.k2 = k2;
        CHECK(open_loop_residual(s).norm() == 0.);
    }

    SECTION("mislogged force is caught") {
        OpenLoopSample s = consistent_sample();
        s.F += Vec3(0.1, 0., 0.);
        CHECK(open_loop_residual(s).norm() == Catch::Approx(0.1).margin(1e-9));
    }

    SECTION("auxiliary split identity") {
        // f_d + (S - m(k1 e1_dot + k2 e2)) == 2 F_f(v_d) - F_f(v)
        for (int i = 0; i < 100; ++i) {
            const OpenLoopSample s = consistent_sample();
            const Vec3 e1_dot = s.e2 - k1 * s.e1;
            const Vec3 f_d = c.cwiseProduct(s.v_d);
            const Vec3 S =
                m * (k1 * e1_dot + k2 * s.e2) - c.cwiseProduct(s.v) + c.cwiseProduct(s.v_d);
            const Vec3 lhs = f_d + (S - m * (k1 * e1_dot + k2 * s.e2));
            const Vec3 rhs =
                c.cwiseProduct(s.v_d) - c.cwiseProduct(s.v) + c.cwiseProduct(s.v_d);
            CHECK((lhs - rhs).norm() < 1e-12);
        }
    }
}
