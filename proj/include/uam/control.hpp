#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uam/core.hpp"
#include "uam/trajectory.hpp"

namespace uam {

struct ControllerGains {
    double k1 = 0.69;
    double k2 = 0.5;
    Vec3 Ks{10., 10., 14.5};    // diagonal of K_s
    Vec3 B1{4., 4., 4.};        // diagonal of B_1
    Vec3 Kp{8., 8., 10.};       // baseline PD
    Vec3 Kd{10., 10., 13.};

    void validate() const {
        if (!(k1 > 0.) || !(k2 > 0.))
            throw std::invalid_argument("gains: k1, k2 must be positive");
        if ((Ks.array() <= 0.).any() || (B1.array() <= 0.).any() || (Kp.array() <= 0.).any() ||
            (Kd.array() <= 0.).any())
            throw std::invalid_argument("gains: diagonal gains must be positive");
    }
};

/// Signum options: the pure elementwise sgn (with sgn(0) = 0) is the
/// default; the tanh(e/eps) variant is a config-gated smoothing for
/// chattering studies and deviates from the nominal law.
struct SgnOptions {
    bool smooth = false;
    double epsilon = 0.01;

    Vec3 operator()(const Vec3& e) const {
        if (!smooth) return sgn(e);
        return (e / epsilon).array().tanh();
    }
};

/// State of the robust integral feedback term. mu(0) = 0 by construction:
/// the two non-integral terms of the closed form cancel at t = 0.
struct RiseState {
    Vec3 mu = Vec3::Zero();
    Vec3 e2_at_start = Vec3::Zero();
    Vec3 e2_prev = Vec3::Zero();
    Vec3 g_prev = Vec3::Zero();
    Vec3 r_free = Vec3::Zero();   // last acceleration-free r reconstruction
    bool started = false;
};

namespace detail {

// integrand of the closed form: (Ks+I) k2 e2 + B1 sgn(e2)
inline Vec3 rise_integrand(const Vec3& e2, const ControllerGains& g, const SgnOptions& sg) {
    return (g.Ks.array() + 1.).matrix().cwiseProduct(g.k2 * e2) + g.B1.cwiseProduct(sg(e2));
}

}  // namespace detail

/// Advances mu by one sample. The continuous law is
///   mu_dot = -(Ks+I) r - B1 sgn(e2),  r = e2_dot + k2 e2,
/// discretized acceleration-free: the e2_dot part integrates exactly as the
/// backward difference of e2, the remaining integrand by the trapezoid
/// rule. Summed over steps this is the discrete form of the closed
/// integral expression; rise_mu_integral_form evaluates that expression
/// independently for cross-checking.
inline Vec3 rise_step(RiseState& st, const Vec3& e2, const ControllerGains& g, double dt,
                      const SgnOptions& sg = {}) {
    if (!(dt > 0.)) throw std::invalid_argument("rise: dt must be positive");
    require_finite(e2, "e2");
    if (!st.started) {
        st.started = true;
        st.e2_at_start = e2;
        st.e2_prev = e2;
        st.g_prev = detail::rise_integrand(e2, g, sg);
        st.mu = Vec3::Zero();
        st.r_free = g.k2 * e2;
        return st.mu;
    }
    const Vec3 ks1 = (g.Ks.array() + 1.).matrix();
    const Vec3 g_now = detail::rise_integrand(e2, g, sg);
    st.mu -= ks1.cwiseProduct(e2 - st.e2_prev) + 0.5 * dt * (g_now + st.g_prev);
    st.r_free = (e2 - st.e2_prev) / dt + g.k2 * e2;
    st.e2_prev = e2;
    st.g_prev = g_now;
    return st.mu;
}

/// Direct evaluation of the closed integral form
///   mu(T) = -(Ks+I)[e2(T) - e2(0)] - int_0^T [(Ks+I) k2 e2 + B1 sgn(e2)]
/// with midpoint quadrature over the same grid. Diagnostic: used to bound
/// the discretization gap of the online accumulation.
inline Vec3 rise_mu_integral_form(const std::function<Vec3(double)>& e2_of_t,
                                  const ControllerGains& g, double T, double dt,
                                  const SgnOptions& sg = {}) {
    const Vec3 ks1 = (g.Ks.array() + 1.).matrix();
    Vec3 integral = Vec3::Zero();
    const long n = std::lround(T / dt);
    for (long i = 0; i < n; ++i)
        integral += dt * detail::rise_integrand(e2_of_t((i + 0.5) * dt), g, sg);
    return -ks1.cwiseProduct(e2_of_t(T) - e2_of_t(0.)) - integral;
}

/// Virtual control input  U = mu + f_hat + m a_d.
inline Vec3 control_input(const TrajectorySample& traj, const Vec3& mu, const Vec3& f_hat,
                          double m_t) {
    return mu + f_hat + m_t * traj.a;
}

/// Actuator-level command  U_c = U + F_c.
inline Vec3 actuator_command(const Vec3& U, const Vec3& F_c) { return U + F_c; }

/// Comparison controller  U_c = -Kp e1 - Kd e1_dot + F_c + m a_d.
inline Vec3 baseline_pd(const TrajectorySample& traj, const Vec3& e1, const Vec3& e1_dot,
                        const Vec3& F_c, const ControllerGains& g, double m_t) {
    return -g.Kp.cwiseProduct(e1) - g.Kd.cwiseProduct(e1_dot) + F_c + m_t * traj.a;
}

/// User-supplied estimates of the analysis constants. These are unknowable
/// from data; the checker evaluates the sufficient conditions against them
/// without claiming the estimates themselves are correct.
struct GainCertificate {
    double zeta1 = 0., zeta2 = 0., zeta3 = 0., zeta4 = 0., zeta5 = 0.;
    double beta2_max = 0.;
    std::optional<double> rho;   // bound estimate for the Ks condition

    void validate() const {
        if (zeta1 < 0. || zeta2 < 0. || zeta3 < 0. || zeta4 < 0. || zeta5 < 0.)
            throw std::invalid_argument("certificate: zeta estimates must be non-negative");
        if (beta2_max < 0.)
            throw std::invalid_argument("certificate: beta2_max must be non-negative");
        if (rho && !(*rho > 0.))
            throw std::invalid_argument("certificate: rho estimate must be positive");
    }
};

enum class ConditionStatus { satisfied, unsatisfied, indeterminate };

inline const char* to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::satisfied: return "satisfied";
        case ConditionStatus::unsatisfied: return "unsatisfied";
        case ConditionStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

struct GainConditionReport {
    ConditionStatus k1_condition;      // k1 > 1/2
    ConditionStatus k2_condition;      // k2 > beta2_max + 1
    ConditionStatus b1_condition;      // beta1_min > z1 + z2 + (z3 + z4)/k2
    ConditionStatus beta2_condition;   // beta2_max > zeta5 (valid B2 exists)
    ConditionStatus ks_condition;      // ks_min >= rho^2 / lambda
    double lambda = 0.;
    double b1_min = 0.;
    double b1_required = 0.;
    double k2_required = 0.;
    double ks_min = 0.;
    double ks_required = 0.;   // meaningful only when rho was supplied

    bool all_satisfied() const {
        return k1_condition == ConditionStatus::satisfied &&
               k2_condition == ConditionStatus::satisfied &&
               b1_condition == ConditionStatus::satisfied &&
               beta2_condition == ConditionStatus::satisfied &&
               ks_condition == ConditionStatus::satisfied;
    }

    std::string summary() const {
        std::ostringstream os;
        os << "k1 > 1/2:                       " << to_string(k1_condition) << "\n"
           << "k2 > beta2_max + 1 (need > " << k2_required << "): " << to_string(k2_condition)
           << "\n"
           << "beta1_min > z1+z2+(z3+z4)/k2 (" << b1_min << " vs " << b1_required
           << "): " << to_string(b1_condition) << "\n"
           << "beta2_max > zeta5:              " << to_string(beta2_condition) << "\n"
           << "ks_min >= rho^2/lambda";
        if (ks_condition == ConditionStatus::indeterminate)
            os << " (no rho estimate supplied): indeterminate\n";
        else
            os << " (" << ks_min << " vs " << ks_required << "): " << to_string(ks_condition)
               << "\n";
        os << "lambda = " << lambda << "\n";
        return os.str();
    }
};

/// Mechanically evaluates the sufficient gain conditions against the
/// supplied certificate. The conditions are sufficient, not necessary:
/// an unsatisfied line flags an analysis-vs-practice gap, not instability.
inline GainConditionReport check_gain_conditions(const ControllerGains& g,
                                                 const GainCertificate& cert) {
    g.validate();
    cert.validate();
    GainConditionReport rep;
    const auto verdict = [](bool ok) {
        return ok ? ConditionStatus::satisfied : ConditionStatus::unsatisfied;
    };

    rep.k1_condition = verdict(g.k1 > 0.5);
    rep.k2_required = cert.beta2_max + 1.;
    rep.k2_condition = verdict(g.k2 > rep.k2_required);

    rep.b1_min = g.B1.minCoeff();
    rep.b1_required = cert.zeta1 + cert.zeta2 + (cert.zeta3 + cert.zeta4) / g.k2;
    rep.b1_condition = verdict(rep.b1_min > rep.b1_required);

    rep.beta2_condition = verdict(cert.beta2_max > cert.zeta5);

    rep.lambda = std::min({2. * g.k1 - 1., g.k2 - cert.beta2_max - 1., 1.});
    rep.ks_min = g.Ks.minCoeff();
    if (!cert.rho) {
        rep.ks_condition = ConditionStatus::indeterminate;
    } else if (rep.lambda <= 0.) {
        rep.ks_condition = ConditionStatus::unsatisfied;
    } else {
        rep.ks_required = (*cert.rho) * (*cert.rho) / rep.lambda;
        rep.ks_condition = verdict(rep.ks_min >= rep.ks_required);
    }
    return rep;
}

}  // namespace uam
