#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uam/core.hpp"

namespace uam {

/// Consistent attitude triple: Rdot = R*skew(omega) holds along any
/// sequence emitted by AttitudeSource, with omega/omega_dot in body frame.
struct AttitudeSample {
    Mat3 R = Mat3::Identity();
    Vec3 omega = Vec3::Zero();
    Vec3 omega_dot = Vec3::Zero();
};

namespace detail {

struct EulerState {
    Vec3 ang = Vec3::Zero();   // roll, pitch, yaw
    Vec3 rate = Vec3::Zero();
    Vec3 acc = Vec3::Zero();
};

// ZYX Euler angles to a consistent (R, omega, omega_dot) triple.
inline AttitudeSample euler_zyx_sample(const EulerState& e) {
    const double ph = e.ang.x(), th = e.ang.y(), ps = e.ang.z();
    const double ph1 = e.rate.x(), th1 = e.rate.y(), ps1 = e.rate.z();
    const double ph2 = e.acc.x(), th2 = e.acc.y(), ps2 = e.acc.z();
    const double sph = std::sin(ph), cph = std::cos(ph);
    const double sth = std::sin(th), cth = std::cos(th);

    AttitudeSample out;
    out.R = rot_z(ps) * rot_y(th) * rot_x(ph);

    out.omega = Vec3(ph1 - ps1 * sth,
                     th1 * cph + ps1 * cth * sph,
                     -th1 * sph + ps1 * cth * cph);

    out.omega_dot = Vec3(
        ph2 - ps2 * sth - ps1 * th1 * cth,
        th2 * cph - th1 * ph1 * sph + ps2 * cth * sph +
            ps1 * (-th1 * sth * sph + ph1 * cth * cph),
        -th2 * sph - th1 * ph1 * cph + ps2 * cth * cph +
            ps1 * (-th1 * sth * cph - ph1 * cth * sph));
    return out;
}

}  // namespace detail

/// Exogenous attitude signal. The translational loop treats the rotation,
/// body rate and body angular acceleration as given measurements; this
/// source generates them in closed form (or replays a recorded sequence).
class AttitudeSource {
  public:
    enum class Mode { zero, prescribed_sinusoid, file_replay };

    static AttitudeSource zero() { return AttitudeSource{}; }

    /// Sinusoidal roll/pitch/yaw angles; amplitudes in rad, frequencies in Hz.
    static AttitudeSource sinusoid(const Vec3& amplitude, const Vec3& frequency_hz,
                                   const Vec3& phase = Vec3::Zero()) {
        AttitudeSource s;
        s.mode_ = Mode::prescribed_sinusoid;
        s.amp_ = amplitude;
        s.freq_ = frequency_hz;
        s.phase_ = phase;
        return s;
    }

    /// Replays rows "t roll pitch yaw droll dpitch dyaw" (whitespace
    /// separated, '#' comments). Angles are interpolated with a cubic
    /// Hermite using the stored rates as slopes, and the interpolant's own
    /// derivatives supply rate/acceleration, so the emitted triple stays
    /// internally consistent between knots.
    static AttitudeSource replay(const std::string& path) {
        AttitudeSource s;
        s.mode_ = Mode::file_replay;
        std::ifstream in(path);
        if (!in) throw std::runtime_error("attitude replay: cannot open " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            Knot k;
            if (!(ls >> k.t >> k.ang.x() >> k.ang.y() >> k.ang.z() >> k.rate.x() >> k.rate.y() >>
                  k.rate.z()))
                throw std::runtime_error("attitude replay: malformed row in " + path);
            if (!s.knots_.empty() && k.t <= s.knots_.back().t)
                throw std::runtime_error("attitude replay: non-increasing time in " + path);
            s.knots_.push_back(k);
        }
        if (s.knots_.size() < 2)
            throw std::runtime_error("attitude replay: need at least two rows in " + path);
        return s;
    }

    Mode mode() const { return mode_; }

    AttitudeSample at(double t) const {
        switch (mode_) {
            case Mode::zero:
                return AttitudeSample{};
            case Mode::prescribed_sinusoid: {
                detail::EulerState e;
                using std::numbers::pi;
                for (int i = 0; i < 3; ++i) {
                    const double w = 2. * pi * freq_[i];
                    const double s = std::sin(w * t + phase_[i]);
                    const double c = std::cos(w * t + phase_[i]);
                    e.ang[i] = amp_[i] * s;
                    e.rate[i] = amp_[i] * w * c;
                    e.acc[i] = -amp_[i] * w * w * s;
                }
                return detail::euler_zyx_sample(e);
            }
            case Mode::file_replay:
                return detail::euler_zyx_sample(hermite(t));
        }
        return AttitudeSample{};
    }

  private:
    struct Knot {
        double t = 0.;
        Vec3 ang = Vec3::Zero();
        Vec3 rate = Vec3::Zero();
    };

    detail::EulerState hermite(double t) const {
        const auto& ks = knots_;
        if (t <= ks.front().t) return {ks.front().ang, ks.front().rate, Vec3::Zero()};
        if (t >= ks.back().t) return {ks.back().ang, ks.back().rate, Vec3::Zero()};
        size_t hi = 1;
        while (ks[hi].t < t) ++hi;
        const Knot& a = ks[hi - 1];
        const Knot& b = ks[hi];
        const double h = b.t - a.t, u = (t - a.t) / h;
        const double u2 = u * u, u3 = u2 * u;
        // Hermite basis and its first two derivatives in u
        const double h00 = 2. * u3 - 3. * u2 + 1., h10 = u3 - 2. * u2 + u;
        const double h01 = -2. * u3 + 3. * u2, h11 = u3 - u2;
        const double g00 = 6. * u2 - 6. * u, g10 = 3. * u2 - 4. * u + 1.;
        const double g01 = -6. * u2 + 6. * u, g11 = 3. * u2 - 2. * u;
        const double q00 = 12. * u - 6., q10 = 6. * u - 4.;
        const double q01 = -12. * u + 6., q11 = 6. * u - 2.;
        detail::EulerState e;
        e.ang = h00 * a.ang + h10 * h * a.rate + h01 * b.ang + h11 * h * b.rate;
        e.rate = (g00 * a.ang + g10 * h * a.rate + g01 * b.ang + g11 * h * b.rate) / h;
        e.acc = (q00 * a.ang + q10 * h * a.rate + q01 * b.ang + q11 * h * b.rate) / (h * h);
        return e;
    }

    Mode mode_ = Mode::zero;
    Vec3 amp_ = Vec3::Zero();
    Vec3 freq_ = Vec3::Zero();
    Vec3 phase_ = Vec3::Zero();
    std::vector<Knot> knots_;
};

}  // namespace uam
