#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uam/core.hpp"

namespace uam {

/// External force profile F_d(t). All kinds are bounded with bounded first
/// and second derivatives: steps and payload events are shaped by the C3
/// smoothstep over a configurable ramp, so the bounded-uncertainty contract
/// the feedback design relies on holds along the whole run.
struct DisturbanceProfile {
    enum class Kind { none, constant, sinusoid, step, payload_event };

    Kind kind = Kind::none;
    Vec3 amplitude = Vec3::Zero();     // N
    double frequency_hz = 0.;          // sinusoid
    std::vector<double> event_times;   // step toggles / {pickup, release}
    double ramp = 0.2;                 // s, smoothing window for events

    void validate() const {
        if (ramp <= 0.) throw std::invalid_argument("disturbance: ramp must be positive");
        for (size_t i = 1; i < event_times.size(); ++i)
            if (event_times[i] <= event_times[i - 1])
                throw std::invalid_argument("disturbance: event times must be increasing");
        if (kind == Kind::payload_event && event_times.size() != 2)
            throw std::invalid_argument("disturbance: payload event needs pickup and release times");
    }

    Vec3 force(double t) const {
        switch (kind) {
            case Kind::none:
            case Kind::payload_event:
                return Vec3::Zero();
            case Kind::constant:
                return amplitude;
            case Kind::sinusoid:
                return amplitude * std::sin(2. * std::numbers::pi * frequency_hz * t);
            case Kind::step:
                return amplitude * toggle_weight(t);
        }
        return Vec3::Zero();
    }

    /// Smoothed indicator for the payload being attached, with analytic
    /// first and second derivatives (zero unless kind == payload_event).
    void payload_weight(double t, double& w, double& w_dot, double& w_ddot) const {
        w = w_dot = w_ddot = 0.;
        if (kind != Kind::payload_event) return;
        const double pickup = event_times[0], release = event_times[1];
        const SmoothStep up = smoothstep_c3((t - pickup) / ramp);
        const SmoothStep down = smoothstep_c3((t - release) / ramp);
        w = up.s - down.s;
        w_dot = (up.s1 - down.s1) / ramp;
        w_ddot = (up.s2 - down.s2) / (ramp * ramp);
    }

  private:
    // each event time toggles the step on/off, ramped over `ramp` seconds
    double toggle_weight(double t) const {
        double w = 0.;
        double sign = 1.;
        for (double te : event_times) {
            w += sign * smoothstep_c3((t - te) / ramp).s;
            sign = -sign;
        }
        return w;
    }
};

}  // namespace uam
