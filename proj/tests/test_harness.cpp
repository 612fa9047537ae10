#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "support/oracles.hpp"
#include "uam/sim/config.hpp"
#include "uam/sim/metrics.hpp"
#include "uam/sim/runner.hpp"
#include "uam/sim/trace.hpp"

using namespace uam;
using namespace uam::sim;

namespace {

SimConfig quiet_config(double duration = 2.) {
    SimConfig cfg;
    cfg.duration = duration;
    cfg.joints.mode = JointConfig::Mode::frozen;
    cfg.attitude.mode = AttitudeConfig::Mode::zero;
    cfg.disturbance.kind = DisturbanceProfile::Kind::none;
    return cfg;
}

SimConfig rich_config(double duration = 3.) {
    SimConfig cfg;
    cfg.duration = duration;
    cfg.joints.mode = JointConfig::Mode::sinusoid;
    cfg.attitude.mode = AttitudeConfig::Mode::prescribed_sinusoid;
    cfg.disturbance.kind = DisturbanceProfile::Kind::sinusoid;
    cfg.disturbance.amplitude = Vec3(1., 1., 1.);
    cfg.disturbance.frequency_hz = 0.1;
    return cfg;
}

}  // namespace

TEST_CASE("config validation and loading") {
    SECTION("rejects out-of-range basics") {
        SimConfig cfg = quiet_config();
        cfg.duration = 0.;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = quiet_config();
        cfg.dt = 0.02;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = quiet_config();
        cfg.dt = 0.;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }

    SECTION("rejects unknown enums and bad schema versions") {
        CHECK_THROWS_AS(SimConfig::from_json({{"scenario", "zigzag"}}), ConfigError);
        CHECK_THROWS_AS(SimConfig::from_json({{"schema_version", 99}}), ConfigError);
        CHECK_THROWS_AS(SimConfig::from_json({{"disturbance", {{"kind", "gusts"}}}}),
                        ConfigError);
    }

    SECTION("round-trips through json") {
        SimConfig cfg = rich_config();
        cfg.seed = 17;
        cfg.gains.k1 = 0.7;
        const SimConfig back = SimConfig::from_json(cfg.to_json());
        CHECK(back.seed == 17);
        CHECK(back.gains.k1 == 0.7);
        CHECK(back.disturbance.kind == DisturbanceProfile::Kind::sinusoid);
        CHECK(back.config_hash() == cfg.config_hash());
    }

    SECTION("hash changes when the config changes") {
        SimConfig a = quiet_config();
        SimConfig b = quiet_config();
        b.gains.k2 = 0.51;
        CHECK(a.config_hash() != b.config_hash());
    }
}

TEST_CASE("traces export and import losslessly") {
    const SimConfig cfg = quiet_config();
    const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
    REQUIRE(res.trace.rows.size() == 2000);

    SECTION("csv round trip preserves every float") {
        const std::string path = "trace_roundtrip_test.csv";
        save_csv(res.trace, path);
        const SimTrace back = load_csv(path);
        REQUIRE(back.rows.size() == res.trace.rows.size());
        REQUIRE(back.layer_count == res.trace.layer_count);
        for (size_t i = 0; i < back.rows.size(); i += 97) {
            const auto a = res.trace.row_values(res.trace.rows[i]);
            const auto b = back.row_values(back.rows[i]);
            REQUIRE(a.size() == b.size());
            for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
        }
        std::remove(path.c_str());
    }

    SECTION("empty trace exports a header-only csv") {
        SimTrace empty;
        empty.layer_count = 4;
        const std::string s = export_csv_string(empty);
        CHECK(s.find("t,p_x") == 0);
        CHECK(std::count(s.begin(), s.end(), '\n') == 1);
    }

    SECTION("summary carries the config hash") {
        const auto j = res.summary(cfg);
        char expect[32];
        std::snprintf(expect, sizeof expect, "%016llx",
                      static_cast<unsigned long long>(cfg.config_hash()));
        CHECK(j.at("config_fnv1a").get<std::string>() == expect);
        CHECK(j.at("status").get<std::string>() == "ok");
        CHECK(j.at("reference_sup").at("v").get<double>() > 0.);
    }
}

TEST_CASE("determinism: identical config and seed give identical bytes") {
    const SimConfig cfg = rich_config(2.);
    const RunResult a = run_scenario(cfg, ControllerKind::dnn_rise);
    const RunResult b = run_scenario(cfg, ControllerKind::dnn_rise);
    CHECK(export_csv_string(a.trace) == export_csv_string(b.trace));

    SimConfig noisy = cfg;
    noisy.noise.enabled = true;
    noisy.noise.sigma_p = 1e-3;
    noisy.noise.sigma_v = 1e-3;
    const RunResult c = run_scenario(noisy, ControllerKind::dnn_rise);
    const RunResult d = run_scenario(noisy, ControllerKind::dnn_rise);
    CHECK(export_csv_string(c.trace) == export_csv_string(d.trace));
    CHECK(export_csv_string(a.trace) != export_csv_string(c.trace));
}

TEST_CASE("per-row bookkeeping identities on a live run") {
    SimConfig cfg = rich_config(3.);
    const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
    const SimTrace& tr = res.trace;
    REQUIRE(tr.status == "ok");

    SECTION("control decomposition and actuator command are exact") {
        for (const auto& row : tr.rows) {
            TrajectorySample traj;
            traj.a = row.pd_ddot;
            const Vec3 U_expect = control_input(traj, row.mu, row.f_hat, cfg.plant.m_t);
            CHECK((row.U - U_expect).norm() == 0.);
            const Vec3 Uc_expect = actuator_command(row.U, row.F_c);
            CHECK((row.U_c - Uc_expect).norm() == 0.);
        }
    }

    SECTION("open-loop residual vanishes on every row") {
        double worst = 0.;
        for (const auto& row : tr.rows)
            worst = std::max(worst, row_open_loop_residual(row, cfg.plant.friction_coeffs,
                                                           cfg.gains.k1, cfg.gains.k2)
                                        .norm());
        CHECK(worst < 1e-9);
    }

    SECTION("velocity updates follow the logged forces at second order") {
        // within a step the virtual input is held, so both endpoint
        // accelerations use U_eff of the row that opened the step
        double worst = 0.;
        for (size_t n = 0; n + 1 < tr.rows.size(); ++n) {
            const auto& a = tr.rows[n];
            const auto& b = tr.rows[n + 1];
            const auto accel = [&](const TraceRow& r) {
                return Vec3((a.U_eff - cfg.plant.friction_coeffs.cwiseProduct(r.v) - r.F) /
                            r.m_eff);
            };
            const Vec3 lhs = (b.v - a.v) / tr.dt;
            const Vec3 rhs = 0.5 * (accel(a) + accel(b));
            worst = std::max(worst, (lhs - rhs).norm());
        }
        CHECK(worst < 1e-4);
    }

    SECTION("logged e1_dot is the finite difference of e1") {
        double worst = 0.;
        for (size_t n = 1; n + 1 < tr.rows.size(); ++n) {
            const Vec3 fd = (tr.rows[n + 1].e1 - tr.rows[n - 1].e1) / (2. * tr.dt);
            const Vec3 e1_dot = tr.rows[n].e2 - cfg.gains.k1 * tr.rows[n].e1;
            worst = std::max(worst, (fd - e1_dot).norm());
        }
        CHECK(worst < 1e-5);
    }

    SECTION("mu moves no faster than its rate bound") {
        for (size_t n = 1; n < tr.rows.size(); ++n) {
            const Vec3 dmu = tr.rows[n].mu - tr.rows[n - 1].mu;
            const Vec3 de2 = tr.rows[n].e2 - tr.rows[n - 1].e2;
            const Vec3 r_free = de2 / tr.dt + cfg.gains.k2 * tr.rows[n].e2;
            const double bound =
                tr.dt * (((cfg.gains.Ks.array() + 1.) * r_free.array()).matrix().norm() +
                         cfg.gains.B1.norm() + 1e-3);
            CHECK(dmu.norm() <= bound);
        }
    }

    SECTION("projection bound holds on every logged step") {
        const double bound = std::sqrt(cfg.dnn.frobenius_bound) + 1e-12;
        for (const auto& row : tr.rows)
            for (double n : row.layer_norms) CHECK(n <= bound);
    }

    SECTION("moving arms keep the coupling force persistently alive") {
        double acc = 0.;
        for (const auto& row : tr.rows) acc += row.F_m.norm();
        CHECK(acc / double(tr.rows.size()) > 1e-4);
    }
}

TEST_CASE("baseline rows log their own decomposition") {
    SimConfig cfg = rich_config(2.);
    const RunResult res = run_scenario(cfg, ControllerKind::baseline);
    for (const auto& row : res.trace.rows) {
        CHECK((row.U - (row.U_c - row.F_c)).norm() == 0.);
        CHECK(row.mu.norm() == 0.);
        CHECK(row.f_hat.norm() == 0.);
        // PD terms recompute from the logged errors
        const Vec3 e1_dot = row.e2 - cfg.gains.k1 * row.e1;
        CHECK((row.pd_p + cfg.gains.Kp.cwiseProduct(row.e1)).norm() == 0.);
        CHECK((row.pd_d + cfg.gains.Kd.cwiseProduct(e1_dot)).norm() < 1e-12);
    }
}

TEST_CASE("metrics") {
    SECTION("identical traces reduce by zero percent") {
        const SimConfig cfg = quiet_config();
        const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
        const MetricsReport rep = compute_metrics(res.trace, res.trace, 1.);
        for (int i = 0; i < 3; ++i) {
            if (rep.mean_reduction_defined[i])
                CHECK(rep.mean_reduction_pct[i] == Catch::Approx(0.).margin(1e-12));
        }
    }

    SECTION("reduction percentage reproduces the reference arithmetic") {
        // mean 0.0425 baseline vs 0.0237 adaptive -> 44.24% reduction
        SimTrace dnn, base;
        dnn.layer_count = base.layer_count = 4;
        for (int i = 0; i < 100; ++i) {
            TraceRow r;
            r.t = i * 0.01;
            r.e1 = Vec3(0.0237, 0., 0.);
            dnn.rows.push_back(r);
            r.e1 = Vec3(0.0425, 0., 0.);
            base.rows.push_back(r);
        }
        const MetricsReport rep = compute_metrics(dnn, base, 0.);
        CHECK(rep.mean_reduction_pct[0] == Catch::Approx(44.2352941176).margin(1e-6));
        CHECK(rep.max_reduction_pct[0] == Catch::Approx(44.2352941176).margin(1e-6));
        CHECK_FALSE(rep.mean_reduction_defined[1]);   // baseline y-error is zero
    }

    SECTION("hand-built three-row trace matches manual arithmetic") {
        SimTrace a, b;
        a.layer_count = b.layer_count = 4;
        const double va[3] = {0.01, -0.03, 0.02};
        const double vb[3] = {0.02, -0.06, 0.04};
        for (int i = 0; i < 3; ++i) {
            TraceRow r;
            r.t = i;
            r.e1 = Vec3(va[i], 2. * va[i], 0.);
            a.rows.push_back(r);
            r.e1 = Vec3(vb[i], 2. * vb[i], 0.);
            b.rows.push_back(r);
        }
        const MetricsReport rep = compute_metrics(a, b, 0.);
        CHECK(rep.dnn_rise.max_abs[0] == Catch::Approx(0.03));
        CHECK(rep.dnn_rise.mean_abs[0] == Catch::Approx(0.02));
        CHECK(rep.baseline.max_abs[0] == Catch::Approx(0.06));
        CHECK(rep.mean_reduction_pct[0] == Catch::Approx(50.));
        CHECK(rep.mean_reduction_pct[1] == Catch::Approx(50.));
    }

    SECTION("mismatched grids are rejected") {
        SimTrace a, b;
        TraceRow r;
        a.rows.push_back(r);
        b.rows.push_back(r);
        b.rows.push_back(r);
        CHECK_THROWS_AS(compute_metrics(a, b, 0.), std::invalid_argument);
        b.rows.pop_back();
        b.rows[0].t = 0.5;
        CHECK_THROWS_AS(compute_metrics(a, b, 0.), std::invalid_argument);
        b.rows[0].t = 0.;
        a.scenario = "spiral";
        b.scenario = "figure-eight";
        CHECK_THROWS_AS(compute_metrics(a, b, 0.), std::invalid_argument);
    }

    SECTION("warmup window must contain samples") {
        const SimConfig cfg = quiet_config();
        const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
        CHECK_THROWS_AS(compute_metrics(res.trace, res.trace, 100.), std::invalid_argument);
    }
}

TEST_CASE("benign regime: both controllers track with exact feedforward") {
    SimConfig cfg = quiet_config(12.);
    cfg.plant.friction_coeffs = Vec3::Zero();   // feedforward is then exact
    cfg.metrics_warmup = 2.;
    const CompareResult res = compare_controllers(cfg);
    for (int i = 0; i < 3; ++i) {
        CHECK(res.metrics.dnn_rise.mean_abs[i] < 1e-3);
        CHECK(res.metrics.baseline.mean_abs[i] < 1e-3);
    }
}

TEST_CASE("divergence terminates the run with a partial trace") {
    SimConfig cfg = quiet_config(10.);
    cfg.disturbance.kind = DisturbanceProfile::Kind::constant;
    cfg.disturbance.amplitude = Vec3(1e6, 0., 0.);
    const RunResult res = run_scenario(cfg, ControllerKind::baseline);
    CHECK(res.diverged);
    CHECK(res.trace.status == "diverged");
    CHECK(res.trace.rows.size() < 10000);
    CHECK(!res.trace.rows.empty());
}

TEST_CASE("controller decimation still tracks") {
    SimConfig cfg = quiet_config(4.);
    cfg.controller_decimation = 5;
    const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
    REQUIRE(res.trace.status == "ok");
    double mean = 0.;
    int count = 0;
    for (const auto& row : res.trace.rows)
        if (row.t >= 2.) {
            mean += row.e1.norm();
            ++count;
        }
    CHECK(mean / count < 5e-3);
}

TEST_CASE("measurement noise stays bounded and seeded") {
    SimConfig cfg = quiet_config(4.);
    cfg.noise.enabled = true;
    cfg.noise.sigma_p = 1e-3;
    cfg.noise.sigma_v = 1e-3;
    const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
    REQUIRE(res.trace.status == "ok");
    double mean = 0.;
    int count = 0;
    for (const auto& row : res.trace.rows)
        if (row.t >= 2.) {
            mean += row.e1.norm();
            ++count;
        }
    CHECK(mean / count < 0.05);
}

TEST_CASE("delivery scenario carries the payload through its events") {
    SimConfig cfg;
    cfg.scenario = Scenario::delivery;
    cfg.duration = 20.;
    cfg.joints.mode = JointConfig::Mode::delivery;
    cfg.attitude.mode = AttitudeConfig::Mode::zero;
    cfg.plant.payload_mass = 0.2;
    const RunResult res = run_scenario(cfg, ControllerKind::dnn_rise);
    REQUIRE(res.trace.status == "ok");

    const auto m_at = [&](double t) {
        for (const auto& row : res.trace.rows)
            if (std::abs(row.t - t) < 1e-9) return row.m_eff;
        return -1.;
    };
    CHECK(m_at(1.) == Catch::Approx(4.85));
    CHECK(m_at(10.) == Catch::Approx(5.05));
    CHECK(m_at(19.) == Catch::Approx(4.85));
}

TEST_CASE("steady-window means are stable across an extra period") {
    SimConfig cfg = rich_config(50.);
    SimConfig longer = rich_config(90.);   // one more 40 s figure-eight period
    const RunResult a = run_scenario(cfg, ControllerKind::baseline);
    const RunResult b = run_scenario(longer, ControllerKind::baseline);
    const auto mean_abs = [](const SimTrace& tr, double warmup) {
        Vec3 acc = Vec3::Zero();
        size_t n = 0;
        for (const auto& row : tr.rows)
            if (row.t >= warmup) {
                acc += row.e1.cwiseAbs();
                ++n;
            }
        return Vec3(acc / double(n));
    };
    const Vec3 ma = mean_abs(a.trace, 10.);
    const Vec3 mb = mean_abs(b.trace, 10.);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(mb[i] - ma[i]) / ma[i] < 0.05);
}
