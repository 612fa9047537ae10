#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "uam/control.hpp"
#include "uam/dnn.hpp"
#include "uam/errors.hpp"
#include "uam/kinematics.hpp"
#include "uam/plant.hpp"
#include "uam/sim/config.hpp"
#include "uam/sim/metrics.hpp"
#include "uam/sim/trace.hpp"

namespace uam::sim {

struct RunResult {
    SimTrace trace;
    bool diverged = false;
    int frozen_weight_steps = 0;
    double sup_v = 0., sup_a = 0., sup_j = 0.;   // reference derivative bounds seen
    DnnParameters dnn;                           // final weights (dnn-rise runs)
    bool has_dnn = false;

    nlohmann::json summary(const SimConfig& cfg) const {
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(cfg.config_hash()));
        nlohmann::json j;
        j["kind"] = "uamsim-summary";
        j["schema_version"] = kSchemaVersion;
        j["scenario"] = trace.scenario;
        j["controller"] = trace.controller;
        j["status"] = trace.status;
        j["dt"] = trace.dt;
        j["steps"] = trace.rows.size();
        j["seed"] = trace.seed;
        j["config_fnv1a"] = std::string(hash);
        j["frozen_weight_steps"] = frozen_weight_steps;
        j["reference_sup"] = {{"v", sup_v}, {"a", sup_a}, {"j", sup_j}};
        if (!trace.rows.empty()) {
            const auto& last = trace.rows.back();
            j["final"] = {{"t", last.t}, {"e1_norm", last.e1.norm()}};
        }
        return j;
    }
};

namespace detail {

/// Everything a scenario needs to evaluate its exogenous signals at an
/// arbitrary time: joint schedule, attitude, disturbance, payload events.
struct ScenarioContext {
    ArmGeometry geom;
    JointSchedule schedule;
    AttitudeSource attitude;
    DisturbanceProfile dist;
    DisturbanceProfile payload;   // payload-event profile or kind none
    double base_mass = 0.;
    double payload_mass = 0.;

    static ScenarioContext make(const SimConfig& cfg) {
        ScenarioContext ctx;
        ctx.geom = cfg.arm;
        ctx.geom.validate();
        ctx.schedule = cfg.make_joint_schedule();
        ctx.attitude = cfg.make_attitude();
        ctx.dist = cfg.disturbance;
        ctx.base_mass = cfg.plant.m_t;
        ctx.payload_mass = cfg.plant.payload_mass;
        if (cfg.disturbance.kind == DisturbanceProfile::Kind::payload_event) {
            ctx.payload = cfg.disturbance;
        } else if (cfg.scenario == Scenario::delivery) {
            ctx.payload.kind = DisturbanceProfile::Kind::payload_event;
            ctx.payload.event_times = {cfg.delivery.pickup_time, cfg.delivery.release_time};
            ctx.payload.ramp = cfg.disturbance.ramp;
            ctx.payload.validate();
        }
        return ctx;
    }

    bool has_payload() const {
        return payload.kind == DisturbanceProfile::Kind::payload_event && payload_mass > 0.;
    }

    JointState joints(double t) const { return joint_schedule(t, schedule); }

    void payload_weight(double t, double& w, double& wd, double& wdd) const {
        w = wd = wdd = 0.;
        if (has_payload()) payload.payload_weight(t, w, wd, wdd);
    }

    PlantSignals signals(double t) const {
        PlantSignals s;
        const AttitudeSample att = attitude.at(t);
        s.R = att.R;
        s.omega = att.omega;
        s.omega_dot = att.omega_dot;

        const JointState js = joints(t);
        ComState com = dual_arm_com(geom, js, js);
        double w, wd, wdd;
        payload_weight(t, w, wd, wdd);
        if (has_payload()) {
            const PointState rod = claw_midpoint_state(geom, js, js);
            com = com_with_payload(com, rod, payload_mass, w, wd, wdd);
        }
        s.r_oc = com.r;
        s.r_oc_dot = com.r_dot;
        s.r_oc_ddot = com.r_ddot;
        s.F_d = dist.force(t);
        s.mass = base_mass + payload_mass * w;
        return s;
    }
};

}  // namespace detail

/// Runs one closed-loop scenario. Deterministic given the config: the seed
/// fixes the weight initialization and the optional measurement noise, and
/// the loop is single-threaded fixed-step, so repeated runs produce
/// byte-identical traces.
inline RunResult run_scenario(const SimConfig& cfg, ControllerKind kind) {
    cfg.validate();
    auto ctx = detail::ScenarioContext::make(cfg);

    std::mt19937_64 rng_weights(cfg.seed);
    std::mt19937_64 rng_noise(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0., 1.);

    DnnParameters dnn = DnnParameters::random_init(cfg.dnn.layer_widths, cfg.dnn.frobenius_bound,
                                                   cfg.dnn.gamma, cfg.dnn.init_scale, rng_weights);
    RiseState rise;
    const double dt = cfg.dt;
    const long steps = std::lround(cfg.duration / dt);
    const double ctrl_dt = dt * cfg.controller_decimation;

    const TrajectorySample traj0 = cfg.sample_trajectory(0.);
    UavState state;
    state.p = traj0.p + cfg.initial_offset;
    state.v = traj0.v;
    const AttitudeSample att0 = ctx.attitude.at(0.);
    state.R = att0.R;
    state.omega = att0.omega;
    state.omega_dot = att0.omega_dot;

    RunResult out;
    out.has_dnn = (kind == ControllerKind::dnn_rise);
    SimTrace& trace = out.trace;
    trace.scenario = to_string(cfg.scenario);
    trace.controller = to_string(kind);
    trace.dt = dt;
    trace.seed = cfg.seed;
    trace.layer_count = static_cast<int>(dnn.weights.size());
    trace.rows.reserve(steps);

    const SignalFn signals = [&ctx](double tau) { return ctx.signals(tau); };

    Vec3 U_c = Vec3::Zero(), U = Vec3::Zero();
    Vec3 mu = Vec3::Zero(), f_hat = Vec3::Zero(), pd_p = Vec3::Zero(), pd_d = Vec3::Zero();

    for (long n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const TrajectorySample traj = cfg.sample_trajectory(t);
        out.sup_v = std::max(out.sup_v, traj.v.norm());
        out.sup_a = std::max(out.sup_a, traj.a.norm());
        out.sup_j = std::max(out.sup_j, traj.j.norm());

        Vec3 p_m = state.p, v_m = state.v;
        if (cfg.noise.enabled) {
            p_m += cfg.noise.sigma_p * Vec3(gauss(rng_noise), gauss(rng_noise), gauss(rng_noise));
            v_m += cfg.noise.sigma_v * Vec3(gauss(rng_noise), gauss(rng_noise), gauss(rng_noise));
        }

        const Vec3 e1 = p_m - traj.p;
        const Vec3 e1_dot = v_m - traj.v;
        const Vec3 e2 = e1_dot + cfg.gains.k1 * e1;

        // controller view: nominal mass, arms-only CoM from measured joints
        const JointState js = ctx.joints(t);
        const ComState arms = dual_arm_com(ctx.geom, js, js);
        UavState att_meas;
        att_meas.R = state.R;
        att_meas.omega = state.omega;
        const Vec3 F_c_ctrl = compensable_force(cfg.plant, att_meas, arms.r);

        if (n % cfg.controller_decimation == 0) {
            if (kind == ControllerKind::dnn_rise) {
                const DnnInput in = DnnInput::from_reference(traj.v, traj.a);
                const DnnForwardCache cache = dnn_forward(dnn, in.x);
                f_hat = cache.output3();
                mu = rise_step(rise, e2, cfg.gains, ctrl_dt, cfg.sgn_options);
                U = control_input(traj, mu, f_hat, cfg.plant.m_t);
                U_c = actuator_command(U, F_c_ctrl);
                if (dnn_adapt(dnn, cache, e2, in.x_dot, ctrl_dt).frozen)
                    ++out.frozen_weight_steps;
                pd_p = pd_d = Vec3::Zero();
            } else {
                U_c = baseline_pd(traj, e1, e1_dot, F_c_ctrl, cfg.gains, cfg.plant.m_t);
                U = U_c - F_c_ctrl;
                mu = Vec3::Zero();
                f_hat = Vec3::Zero();
                pd_p = -cfg.gains.Kp.cwiseProduct(e1);
                pd_d = -cfg.gains.Kd.cwiseProduct(e1_dot);
            }
        } else {
            U = U_c - F_c_ctrl;   // actuator command held between controller samples
        }

        // true plant side (payload-aware)
        const PlantSignals sig = ctx.signals(t);
        PlantParams eff = cfg.plant;
        eff.m_t = sig.mass;
        UavState att_true;
        att_true.R = sig.R;
        att_true.omega = sig.omega;
        att_true.omega_dot = sig.omega_dot;
        const Vec3 F_true = lumped_uncertainty(eff, att_true, sig.F_d, sig.r_oc, sig.r_oc_dot,
                                               sig.r_oc_ddot);
        const Vec3 F_m_true = coupling_force(eff, att_true, sig.r_oc, sig.r_oc_dot, sig.r_oc_ddot);
        const Vec3 F_c_true = compensable_force(eff, att_true, sig.r_oc);
        const Vec3 U_eff = U_c - F_c_true;
        const Vec3 a_true = plant_acceleration(state, cfg.plant, U_eff, sig);
        const Vec3 e2_dot = (a_true - traj.a) + cfg.gains.k1 * e1_dot;
        const Vec3 r = e2_dot + cfg.gains.k2 * e2;

        TraceRow row;
        row.t = t;
        row.p = p_m;
        row.v = v_m;
        row.p_d = traj.p;
        row.e1 = e1;
        row.e2 = e2;
        row.r = r;
        row.U = U;
        row.U_c = U_c;
        row.mu = mu;
        row.f_hat = f_hat;
        row.F_m = F_m_true;
        row.F_c = F_c_ctrl;
        row.F_d = sig.F_d;
        row.layer_norms = (kind == ControllerKind::dnn_rise)
                              ? weight_norms(dnn)
                              : std::vector<double>(dnn.weights.size(), 0.);
        row.pd_dot = traj.v;
        row.pd_ddot = traj.a;
        row.F = F_true;
        row.U_eff = U_eff;
        row.pd_p = pd_p;
        row.pd_d = pd_d;
        row.m_eff = sig.mass;
        trace.rows.push_back(std::move(row));

        try {
            state = plant_step(state, cfg.plant, U_eff, signals, t, dt);
        } catch (const std::runtime_error&) {
            trace.status = "diverged";
            out.diverged = true;
            break;
        }
        if (state.p.norm() > cfg.plant.divergence_bound) {
            trace.status = "diverged";
            out.diverged = true;
            break;
        }
    }

    out.dnn = std::move(dnn);
    return out;
}

struct CompareResult {
    RunResult dnn_rise;
    RunResult baseline;
    MetricsReport metrics;
};

/// Raised when a closed-loop run leaves the configured divergence bound;
/// the CLI maps it to exit code 3.
struct DivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs both controllers under the identical scenario realization (same
/// seed, hence same disturbance, attitude, joint motion and noise draws)
/// and reports the error-table comparison.
inline CompareResult compare_controllers(const SimConfig& cfg) {
    CompareResult res;
    res.dnn_rise = run_scenario(cfg, ControllerKind::dnn_rise);
    res.baseline = run_scenario(cfg, ControllerKind::baseline);
    if (res.dnn_rise.diverged || res.baseline.diverged)
        throw DivergedError("compare: scenario diverged for " +
                            std::string(res.dnn_rise.diverged ? "dnn-rise" : "baseline"));
    res.metrics = compute_metrics(res.dnn_rise.trace, res.baseline.trace, cfg.metrics_warmup);
    return res;
}

}  // namespace uam::sim
