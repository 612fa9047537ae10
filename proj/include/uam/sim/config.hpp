#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uam/attitude.hpp"
#include "uam/control.hpp"
#include "uam/core.hpp"
#include "uam/disturbance.hpp"
#include "uam/kinematics.hpp"
#include "uam/plant.hpp"
#include "uam/trajectory.hpp"

namespace uam::sim {

inline constexpr int kSchemaVersion = 1;

/// Raised for anything wrong with a configuration; the CLI maps it to
/// exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { figure_eight, spiral, delivery };
enum class ControllerKind { dnn_rise, baseline };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::figure_eight: return "figure-eight";
        case Scenario::spiral: return "spiral";
        case Scenario::delivery: return "delivery";
    }
    return "?";
}

inline std::string to_string(ControllerKind c) {
    return c == ControllerKind::dnn_rise ? "dnn-rise" : "baseline";
}

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "figure-eight" || s == "figure8" || s == "fig8") return Scenario::figure_eight;
    if (s == "spiral") return Scenario::spiral;
    if (s == "delivery") return Scenario::delivery;
    throw ConfigError("unknown scenario '" + s + "'");
}

inline ControllerKind controller_from_string(const std::string& s) {
    if (s == "dnn-rise") return ControllerKind::dnn_rise;
    if (s == "baseline") return ControllerKind::baseline;
    throw ConfigError("unknown controller '" + s + "'");
}

struct DnnConfig {
    std::vector<int> layer_widths{3, 4, 4, 4, 3};
    double gamma = 2.0e6;
    double frobenius_bound = 100.;
    double init_scale = 0.1;
};

struct JointConfig {
    enum class Mode { frozen, sinusoid, delivery };
    Mode mode = Mode::sinusoid;
    std::array<double, 3> amplitude{0.5, 0.4, 0.3};
    std::array<double, 3> frequency_hz{1. / 20., 1. / 20., 1. / 20.};
    std::array<double, 3> phase{0., std::numbers::pi / 2., 0.};
    std::array<double, 3> offset{0., 0., 0.};
};

struct AttitudeConfig {
    enum class Mode { zero, prescribed_sinusoid, file_replay };
    Mode mode = Mode::zero;
    Vec3 amplitude{0.05, 0.05, 0.02};
    Vec3 frequency_hz{0.10, 0.13, 0.07};
    Vec3 phase{0., 1., 2.};
    std::string file;
};

struct NoiseConfig {
    bool enabled = false;
    double sigma_p = 0.;
    double sigma_v = 0.;
};

struct SimConfig {
    Scenario scenario = Scenario::figure_eight;
    double dt = 1e-3;
    double duration = 40.;
    std::uint64_t seed = 1;
    Vec3 initial_offset = Vec3::Zero();
    int controller_decimation = 1;

    PlantParams plant;
    ControllerGains gains;
    DnnConfig dnn;
    DisturbanceProfile disturbance;
    AttitudeConfig attitude;
    JointConfig joints;
    ArmGeometry arm = ArmGeometry::standard();
    DeliveryConfig delivery;
    NoiseConfig noise;
    SgnOptions sgn_options;
    double metrics_warmup = 10.;
    std::string out_dir = "out";

    void validate() const {
        if (!(dt > 0.) || dt > 0.01) throw ConfigError("dt must lie in (0, 0.01] s");
        if (!(duration >= 1.)) throw ConfigError("duration must be at least 1 s");
        if (controller_decimation < 1) throw ConfigError("controller_decimation must be >= 1");
        if (!(metrics_warmup >= 0.)) throw ConfigError("metrics warmup must be non-negative");
        if (noise.enabled && (noise.sigma_p < 0. || noise.sigma_v < 0.))
            throw ConfigError("noise sigmas must be non-negative");
        try {
            plant.validate();
            gains.validate();
            arm.validate();
            disturbance.validate();
            if (scenario == Scenario::delivery) delivery.validate();
            if (!(sgn_options.epsilon > 0.)) throw std::invalid_argument("sgn epsilon must be positive");
            if (static_cast<int>(dnn.layer_widths.size()) < 3)
                throw std::invalid_argument("dnn needs at least one hidden layer");
            if (dnn.layer_widths.front() != 3 || dnn.layer_widths.back() != 3)
                throw std::invalid_argument("dnn input/output widths must be 3");
            if (!(dnn.gamma > 0.) || !(dnn.frobenius_bound > 0.) || dnn.init_scale < 0.)
                throw std::invalid_argument("dnn gains/bounds must be positive");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (attitude.mode == AttitudeConfig::Mode::file_replay && attitude.file.empty())
            throw ConfigError("attitude file-replay mode needs a file path");
    }

    AttitudeSource make_attitude() const {
        switch (attitude.mode) {
            case AttitudeConfig::Mode::zero: return AttitudeSource::zero();
            case AttitudeConfig::Mode::prescribed_sinusoid:
                return AttitudeSource::sinusoid(attitude.amplitude, attitude.frequency_hz,
                                                attitude.phase);
            case AttitudeConfig::Mode::file_replay: return AttitudeSource::replay(attitude.file);
        }
        return AttitudeSource::zero();
    }

    JointSchedule make_joint_schedule() const {
        switch (joints.mode) {
            case JointConfig::Mode::frozen: {
                return JointSchedule::frozen(
                    Vec3(joints.offset[0], joints.offset[1], joints.offset[2]));
            }
            case JointConfig::Mode::sinusoid: {
                JointSchedule s;
                for (int i = 0; i < 3; ++i)
                    s.joints[i] = {joints.amplitude[i], joints.frequency_hz[i], joints.phase[i],
                                   joints.offset[i]};
                return s;
            }
            case JointConfig::Mode::delivery:
                return JointSchedule::delivery(delivery.pickup_time, delivery.release_time);
        }
        return JointSchedule::periodic();
    }

    TrajectorySample sample_trajectory(double t) const {
        switch (scenario) {
            case Scenario::figure_eight: return figure_eight(t);
            case Scenario::spiral: return spiral(t);
            case Scenario::delivery: return delivery_mission(t, delivery);
        }
        return {};
    }

    nlohmann::json to_json() const;
    static SimConfig from_json(const nlohmann::json& j);
    static SimConfig from_file(const std::string& path);

    /// FNV-1a over the canonical serialized form; recorded in summaries so
    /// a trace can be tied back to the exact configuration.
    std::uint64_t config_hash() const {
        const std::string s = to_json().dump();
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
};

namespace detail {

inline nlohmann::json vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

inline Vec3 vec3_from(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be [x,y,z]");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void maybe_vec3(const nlohmann::json& j, const char* key, Vec3& out) {
    if (j.contains(key)) out = vec3_from(j.at(key), key);
}

template <size_t N>
void maybe_arr(const nlohmann::json& j, const char* key, std::array<double, N>& out) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        throw ConfigError(std::string(key) + " must have " + std::to_string(N) + " entries");
    for (size_t i = 0; i < N; ++i) out[i] = a[i].get<double>();
}

inline const char* to_string(DisturbanceProfile::Kind k) {
    switch (k) {
        case DisturbanceProfile::Kind::none: return "none";
        case DisturbanceProfile::Kind::constant: return "constant";
        case DisturbanceProfile::Kind::sinusoid: return "sinusoid";
        case DisturbanceProfile::Kind::step: return "step";
        case DisturbanceProfile::Kind::payload_event: return "payload-event";
    }
    return "?";
}

inline DisturbanceProfile::Kind dist_kind_from(const std::string& s) {
    using K = DisturbanceProfile::Kind;
    if (s == "none") return K::none;
    if (s == "constant") return K::constant;
    if (s == "sinusoid") return K::sinusoid;
    if (s == "step") return K::step;
    if (s == "payload-event") return K::payload_event;
    throw ConfigError("unknown disturbance kind '" + s + "'");
}

}  // namespace detail

inline nlohmann::json SimConfig::to_json() const {
    using detail::vec3_json;
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = to_string(scenario);
    j["dt"] = dt;
    j["duration"] = duration;
    j["seed"] = seed;
    j["initial_offset"] = vec3_json(initial_offset);
    j["controller_decimation"] = controller_decimation;
    j["plant"] = {{"m_t", plant.m_t},
                  {"g", plant.g},
                  {"friction", vec3_json(plant.friction_coeffs)},
                  {"payload_mass", plant.payload_mass},
                  {"divergence_bound", plant.divergence_bound}};
    j["gains"] = {{"k1", gains.k1},   {"k2", gains.k2},   {"Ks", vec3_json(gains.Ks)},
                  {"B1", vec3_json(gains.B1)}, {"Kp", vec3_json(gains.Kp)},
                  {"Kd", vec3_json(gains.Kd)}};
    j["dnn"] = {{"layer_widths", dnn.layer_widths},
                {"gamma", dnn.gamma},
                {"frobenius_bound", dnn.frobenius_bound},
                {"init_scale", dnn.init_scale}};
    j["disturbance"] = {{"kind", detail::to_string(disturbance.kind)},
                        {"amplitude", vec3_json(disturbance.amplitude)},
                        {"frequency_hz", disturbance.frequency_hz},
                        {"event_times", disturbance.event_times},
                        {"ramp", disturbance.ramp}};
    const char* att_mode = attitude.mode == AttitudeConfig::Mode::zero ? "zero"
                           : attitude.mode == AttitudeConfig::Mode::prescribed_sinusoid
                               ? "prescribed-sinusoid"
                               : "file-replay";
    j["attitude"] = {{"mode", att_mode},
                     {"amplitude", vec3_json(attitude.amplitude)},
                     {"frequency_hz", vec3_json(attitude.frequency_hz)},
                     {"phase", vec3_json(attitude.phase)},
                     {"file", attitude.file}};
    const char* joint_mode = joints.mode == JointConfig::Mode::frozen     ? "frozen"
                             : joints.mode == JointConfig::Mode::sinusoid ? "sinusoid"
                                                                          : "delivery";
    j["joints"] = {{"mode", joint_mode},
                   {"amplitude", joints.amplitude},
                   {"frequency_hz", joints.frequency_hz},
                   {"phase", joints.phase},
                   {"offset", joints.offset}};
    j["arm"] = {{"lengths", {arm.L1, arm.L2, arm.L3}},
                {"masses", {arm.m_shoulder, arm.m_elbow_pitch, arm.m_elbow_roll, arm.m_claw}},
                {"mount_offset", vec3_json(arm.mount_offset)},
                {"mirror", arm.mirror},
                {"joint_limit", arm.joint_limit}};
    j["delivery"] = {{"start", vec3_json(delivery.start)},
                     {"target", vec3_json(delivery.target)},
                     {"cruise_height", delivery.cruise_height},
                     {"pickup_time", delivery.pickup_time},
                     {"release_time", delivery.release_time}};
    j["noise"] = {{"enabled", noise.enabled}, {"sigma_p", noise.sigma_p},
                  {"sigma_v", noise.sigma_v}};
    j["sgn"] = {{"smooth", sgn_options.smooth}, {"epsilon", sgn_options.epsilon}};
    j["metrics"] = {{"warmup", metrics_warmup}};
    j["output"] = {{"dir", out_dir}};
    return j;
}

inline SimConfig SimConfig::from_json(const nlohmann::json& j) {
    using detail::maybe;
    using detail::maybe_arr;
    using detail::maybe_vec3;
    SimConfig c;
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
        throw ConfigError("unsupported schema_version (expected " +
                          std::to_string(kSchemaVersion) + ")");
    if (j.contains("scenario")) c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    maybe(j, "dt", c.dt);
    maybe(j, "duration", c.duration);
    maybe(j, "seed", c.seed);
    maybe_vec3(j, "initial_offset", c.initial_offset);
    maybe(j, "controller_decimation", c.controller_decimation);

    if (j.contains("plant")) {
        const auto& p = j.at("plant");
        maybe(p, "m_t", c.plant.m_t);
        maybe(p, "g", c.plant.g);
        maybe_vec3(p, "friction", c.plant.friction_coeffs);
        maybe(p, "payload_mass", c.plant.payload_mass);
        maybe(p, "divergence_bound", c.plant.divergence_bound);
    }
    if (j.contains("gains")) {
        const auto& g = j.at("gains");
        maybe(g, "k1", c.gains.k1);
        maybe(g, "k2", c.gains.k2);
        maybe_vec3(g, "Ks", c.gains.Ks);
        maybe_vec3(g, "B1", c.gains.B1);
        maybe_vec3(g, "Kp", c.gains.Kp);
        maybe_vec3(g, "Kd", c.gains.Kd);
    }
    if (j.contains("dnn")) {
        const auto& d = j.at("dnn");
        maybe(d, "layer_widths", c.dnn.layer_widths);
        maybe(d, "gamma", c.dnn.gamma);
        maybe(d, "frobenius_bound", c.dnn.frobenius_bound);
        maybe(d, "init_scale", c.dnn.init_scale);
    }
    if (j.contains("disturbance")) {
        const auto& d = j.at("disturbance");
        if (d.contains("kind"))
            c.disturbance.kind = detail::dist_kind_from(d.at("kind").get<std::string>());
        maybe_vec3(d, "amplitude", c.disturbance.amplitude);
        maybe(d, "frequency_hz", c.disturbance.frequency_hz);
        maybe(d, "event_times", c.disturbance.event_times);
        maybe(d, "ramp", c.disturbance.ramp);
    }
    if (j.contains("attitude")) {
        const auto& a = j.at("attitude");
        if (a.contains("mode")) {
            const auto m = a.at("mode").get<std::string>();
            if (m == "zero")
                c.attitude.mode = AttitudeConfig::Mode::zero;
            else if (m == "prescribed-sinusoid")
                c.attitude.mode = AttitudeConfig::Mode::prescribed_sinusoid;
            else if (m == "file-replay")
                c.attitude.mode = AttitudeConfig::Mode::file_replay;
            else
                throw ConfigError("unknown attitude mode '" + m + "'");
        }
        maybe_vec3(a, "amplitude", c.attitude.amplitude);
        maybe_vec3(a, "frequency_hz", c.attitude.frequency_hz);
        maybe_vec3(a, "phase", c.attitude.phase);
        maybe(a, "file", c.attitude.file);
    }
    if (j.contains("joints")) {
        const auto& jn = j.at("joints");
        if (jn.contains("mode")) {
            const auto m = jn.at("mode").get<std::string>();
            if (m == "frozen")
                c.joints.mode = JointConfig::Mode::frozen;
            else if (m == "sinusoid")
                c.joints.mode = JointConfig::Mode::sinusoid;
            else if (m == "delivery")
                c.joints.mode = JointConfig::Mode::delivery;
            else
                throw ConfigError("unknown joint mode '" + m + "'");
        }
        maybe_arr(jn, "amplitude", c.joints.amplitude);
        maybe_arr(jn, "frequency_hz", c.joints.frequency_hz);
        maybe_arr(jn, "phase", c.joints.phase);
        maybe_arr(jn, "offset", c.joints.offset);
    }
    if (j.contains("arm")) {
        const auto& a = j.at("arm");
        if (a.contains("lengths")) {
            const auto& l = a.at("lengths");
            if (!l.is_array() || l.size() != 3) throw ConfigError("arm lengths must be [L1,L2,L3]");
            c.arm.L1 = l[0].get<double>();
            c.arm.L2 = l[1].get<double>();
            c.arm.L3 = l[2].get<double>();
        }
        if (a.contains("masses")) {
            const auto& m = a.at("masses");
            if (!m.is_array() || m.size() != 4)
                throw ConfigError("arm masses must be [shoulder,elbow_pitch,elbow_roll,claw]");
            c.arm.m_shoulder = m[0].get<double>();
            c.arm.m_elbow_pitch = m[1].get<double>();
            c.arm.m_elbow_roll = m[2].get<double>();
            c.arm.m_claw = m[3].get<double>();
        }
        maybe_vec3(a, "mount_offset", c.arm.mount_offset);
        maybe(a, "mirror", c.arm.mirror);
        maybe(a, "joint_limit", c.arm.joint_limit);
        c.arm.set_default_dh();
    }
    if (j.contains("delivery")) {
        const auto& d = j.at("delivery");
        maybe_vec3(d, "start", c.delivery.start);
        maybe_vec3(d, "target", c.delivery.target);
        maybe(d, "cruise_height", c.delivery.cruise_height);
        maybe(d, "pickup_time", c.delivery.pickup_time);
        maybe(d, "release_time", c.delivery.release_time);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        maybe(n, "enabled", c.noise.enabled);
        maybe(n, "sigma_p", c.noise.sigma_p);
        maybe(n, "sigma_v", c.noise.sigma_v);
    }
    if (j.contains("sgn")) {
        const auto& s = j.at("sgn");
        maybe(s, "smooth", c.sgn_options.smooth);
        maybe(s, "epsilon", c.sgn_options.epsilon);
    }
    if (j.contains("metrics")) maybe(j.at("metrics"), "warmup", c.metrics_warmup);
    if (j.contains("output")) maybe(j.at("output"), "dir", c.out_dir);
    c.validate();
    return c;
}

inline SimConfig SimConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field error in " + path + ": " + e.what());
    }
}

}  // namespace uam::sim
