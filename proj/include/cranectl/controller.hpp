// Output-constrained anti-sway control law with composite-error coupling,
// plus the closed-loop energy diagnostics used to monitor its decrease.
#pragma once

#include <cmath>
#include <utility>

#include "cranectl/dynamics.hpp"

namespace cranectl {

/// Tunable controller gains. All strictly positive; the fuzzy tuner is
/// responsible for clamping its increments so this holds online.
struct ControllerGains {
    double kp = 1.5;   ///< force-scale gain
    double kd = 250.0; ///< damping gain
    double kl = 0.01;  ///< coupling gain

    bool valid() const { return kp > 0 && kd > 0 && kl > 0; }
};

/// Controller auxiliary state: the two running integrals of sin(theta_i)
/// that form the composite signal, and the positioning target. The integrals
/// are advanced by the shared RK integrator as part of the augmented state.
struct ControllerState {
    double int_sin_theta1 = 0.0;  ///< integral of sin(theta1) dt [rad s]
    double int_sin_theta2 = 0.0;  ///< integral of sin(theta2) dt [rad s]
    double x_d = 0.7;             ///< target trolley displacement [m]
};

struct CompositeError {
    double e_eps;      ///< composite position error [m]
    double e_eps_dot;  ///< its rate [m/s]
};

/// Composite error: trolley error minus the coupling integrals,
///   e_eps = x - x_d - kl l1 (int sin(theta1) + int sin(theta2)).
inline CompositeError composite_error(const ControllerState& cs,
                                      const CraneState& s, double kl,
                                      const CraneParams& p) {
    const double coupling = cs.int_sin_theta1 + cs.int_sin_theta2;
    return {s.x - cs.x_d - kl * p.l1 * coupling,
            s.x_dot - kl * p.l1 * (std::sin(s.theta1) + std::sin(s.theta2))};
}

/// Hyperbolic-tangent saturation bound on the initial-state control action:
/// |u(0)| < kp (m - m2 l2 / l1) for any target. Degenerates (goes nonpositive)
/// for heavy payloads on long l2; callers should warn when that happens.
inline double initial_force_bound(const CraneParams& p, double kp) {
    return kp * (p.m - p.m2 * p.l2 / p.l1);
}

/// The control force. The tanh argument is grouped as
/// (e_eps - (theta1 + theta2)) / l1, the grouping under which the closed-form
/// initial force reduces to -kp (m - m2 l2/l1) tanh(-x_d/l1).
inline double control_force(const CraneParams& p, const ControllerGains& k,
                            const ControllerState& cs, const CraneState& s) {
    const double c1 = std::cos(s.theta1);
    const double c2 = std::cos(s.theta2);
    const double w1 = s.theta1_dot;
    const double w2 = s.theta2_dot;
    const auto [e_eps, e_eps_dot] = composite_error(cs, s, k.kl, p);

    const double sat = std::tanh((e_eps - (s.theta1 + s.theta2)) / p.l1);
    const double damping = k.kd * (e_eps_dot / p.m - w1 / (p.m * p.l1));
    const double coupling =
        k.kl * (p.m * p.l1 * (c1 * w1 + c2 * w2) -
                p.m2 * p.l2 * c2 * (w2 - w1));
    const double grav1 = (p.m1 * p.g + p.m2 * p.m2 * p.g / p.m1 -
                          p.m2 * p.m2 * p.g * p.l2 / (p.m1 * p.l1) +
                          2.0 * p.m2 * p.g) *
                         s.theta1;
    const double grav2 = (p.m2 * p.m2 * p.g / p.m1 + p.m2 * p.g) * s.theta2;
    const double centrifugal = (p.m1 * p.l1 + p.m2 * p.l1) * s.theta1 * w1 * w1 +
                               p.m2 * p.l2 * s.theta2 * w2 * w2;

    return -initial_force_bound(p, k.kp) * sat - damping + coupling - grav1 +
           grav2 - centrifugal;
}

/// Energy-like monitor value V and its analytic derivative.
struct LyapunovSample {
    double v;
    double v_dot;
};

/// Offset of V at the converged equilibrium (the constant term of the shaped
/// potential); subtract it when plotting V relative to its floor.
inline double lyapunov_offset(const CraneParams& p) {
    return 3.0 * p.m2 * p.g / (p.m1 * p.l1);
}

/// Closed-loop energy monitor. V combines the composite-error kinetic term
/// with the shaped potential; v_dot is the analytic negative-semidefinite
/// damping form. Both are diagnostics: v_dot <= 0 holds by construction,
/// while V itself is only approximately non-increasing because the
/// energy-shaping match is exact only in two projected directions.
inline LyapunovSample lyapunov(const CraneParams& p, const ControllerGains& k,
                               const ControllerState& cs, const CraneState& s) {
    const auto [e_eps, e_eps_dot] = composite_error(cs, s, k.kl, p);
    const double w1 = s.theta1_dot;
    const double w2 = s.theta2_dot;

    const double kinetic = 0.5 * (e_eps_dot * e_eps_dot + w1 * w1 + w2 * w2);
    const double spring =
        0.5 * (p.g / p.l1 + p.m2 * p.g / (p.m1 * p.l1)) * s.theta1 * s.theta1;
    const double arg = (e_eps - (s.theta1 + s.theta2)) / p.l1;
    const double sat_well = k.kp * std::log(std::cosh(arg));
    const double cross = (3.0 - s.theta1 * s.theta2) * p.m2 * p.g / (p.m1 * p.l1);

    const double v = kinetic + spring + sat_well + cross;

    const double d = p.l1 * e_eps_dot - w1;
    const double v_dot =
        -k.kl * (std::cos(s.theta1) * w1 * w1 + std::cos(s.theta2) * w2 * w2) -
        k.kd / (p.m * p.m * p.l1 * p.l1) * d * d;

    return {v, v_dot};
}

}  // namespace cranectl
