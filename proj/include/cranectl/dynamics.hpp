// Full nonlinear 3-DOF double-pendulum overhead crane plant.
// Pure stateless functions over value types; angles are measured from the
// downward vertical, x is the trolley displacement along the rail.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cranectl {

using Vec3 = std::array<double, 3>;

/// 3x3 matrix, row-major.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int r, int c) { return a[3 * r + c]; }
    double operator()(int r, int c) const { return a[3 * r + c]; }
};

/// Thrown when the 3x3 inertia solve degenerates (invalid parameters).
struct SingularMass : std::runtime_error {
    explicit SingularMass(const std::string& what) : std::runtime_error(what) {}
};

/// Crane geometry and masses. All strictly positive.
struct CraneParams {
    double m = 10.0;   ///< trolley mass [kg]
    double m1 = 1.0;   ///< hook mass [kg]
    double m2 = 2.0;   ///< payload mass [kg]
    double l1 = 0.7;   ///< trolley-hook rope length [m]
    double l2 = 0.3;   ///< hook-payload rope length [m]
    double g = 9.81;   ///< gravitational acceleration [m/s^2]

    bool valid() const {
        return m > 0 && m1 > 0 && m2 > 0 && l1 > 0 && l2 > 0 && g > 0;
    }
};

/// Simulation state: trolley displacement, the two swing angles, and rates.
struct CraneState {
    double x = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double x_dot = 0.0;
    double theta1_dot = 0.0;
    double theta2_dot = 0.0;
};

/// The model geometry is invalid once a rope passes horizontal.
inline constexpr double kMaxSwingAngle = 1.5707963267948966;  // pi/2

inline bool within_swing_limit(const CraneState& s) {
    return std::abs(s.theta1) < kMaxSwingAngle &&
           std::abs(s.theta2) < kMaxSwingAngle;
}

/// Full nonlinear inertia matrix M(q). Symmetric by construction and
/// positive definite for |theta_i| < pi/2.
inline Mat3 mass_matrix(const CraneParams& p, const CraneState& s) {
    const double c1 = std::cos(s.theta1);
    const double c2 = std::cos(s.theta2);
    const double c12 = std::cos(s.theta1 - s.theta2);

    Mat3 M;
    M(0, 0) = p.m + p.m1 + p.m2;
    M(0, 1) = (p.m1 + p.m2) * p.l1 * c1;
    M(0, 2) = p.m2 * p.l2 * c2;
    M(1, 1) = (p.m1 + p.m2) * p.l1 * p.l1;
    M(1, 2) = p.m2 * p.l1 * p.l2 * c12;
    M(2, 2) = p.m2 * p.l2 * p.l2;
    M(1, 0) = M(0, 1);
    M(2, 0) = M(0, 2);
    M(2, 1) = M(1, 2);
    return M;
}

/// Direct 3x3 solve by cofactor expansion (Cramer). Deterministic; no pivoting
/// is needed at this size and conditioning.
inline Vec3 solve3(const Mat3& M, const Vec3& b) {
    const double c00 = M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    const double c01 = M(1, 2) * M(2, 0) - M(1, 0) * M(2, 2);
    const double c02 = M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0);
    const double det = M(0, 0) * c00 + M(0, 1) * c01 + M(0, 2) * c02;

    double scale = 0.0;
    for (double v : M.a) scale = std::max(scale, std::abs(v));
    if (!(std::abs(det) > 1e-14 * scale * scale * scale)) {
        throw SingularMass("inertia matrix is numerically singular");
    }

    const double c10 = M(0, 2) * M(2, 1) - M(0, 1) * M(2, 2);
    const double c11 = M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0);
    const double c12 = M(0, 1) * M(2, 0) - M(0, 0) * M(2, 1);
    const double c20 = M(0, 1) * M(1, 2) - M(0, 2) * M(1, 1);
    const double c21 = M(0, 2) * M(1, 0) - M(0, 0) * M(1, 2);
    const double c22 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);

    return {(c00 * b[0] + c10 * b[1] + c20 * b[2]) / det,
            (c01 * b[0] + c11 * b[1] + c21 * b[2]) / det,
            (c02 * b[0] + c12 * b[1] + c22 * b[2]) / det};
}

/// Right-hand side of M(q) qdd = rhs: the input force plus the centrifugal
/// and gravity terms of the three Lagrangian equations moved to the right.
inline Vec3 dynamics_rhs(const CraneParams& p, const CraneState& s, double u) {
    const double s1 = std::sin(s.theta1);
    const double s2 = std::sin(s.theta2);
    const double s12 = std::sin(s.theta1 - s.theta2);
    const double w1 = s.theta1_dot;
    const double w2 = s.theta2_dot;

    return {u + (p.m1 + p.m2) * p.l1 * s1 * w1 * w1 +
                p.m2 * p.l2 * s2 * w2 * w2,
            -p.m2 * p.l1 * p.l2 * s12 * w2 * w2 -
                (p.m1 + p.m2) * p.g * p.l1 * s1,
            p.m2 * p.l1 * p.l2 * s12 * w1 * w1 - p.m2 * p.g * p.l2 * s2};
}

/// Generalized accelerations (x_dd, theta1_dd, theta2_dd) of the full
/// nonlinear plant under control force u.
inline Vec3 accelerations(const CraneParams& p, const CraneState& s, double u) {
    return solve3(mass_matrix(p, s), dynamics_rhs(p, s, u));
}

/// Small-angle model: constant inertia matrix, linearized centrifugal row and
/// gravity. Used for linearization-equivalence checks, not for simulation.
inline Vec3 accelerations_small_angle(const CraneParams& p, const CraneState& s,
                                      double u) {
    CraneState hang;  // theta = 0 gives the constant matrix
    const Mat3 M = mass_matrix(p, hang);
    const double w1 = s.theta1_dot;
    const double w2 = s.theta2_dot;
    const Vec3 rhs = {u + (p.m1 + p.m2) * p.l1 * s.theta1 * w1 * w1 +
                          p.m2 * p.l2 * s.theta2 * w2 * w2,
                      -(p.m1 + p.m2) * p.g * p.l1 * s.theta1,
                      -p.m2 * p.g * p.l2 * s.theta2};
    return solve3(M, rhs);
}

/// Total mechanical energy, zero at rest at the origin. Serves as a
/// conservation oracle for the open-loop plant.
inline double mechanical_energy(const CraneParams& p, const CraneState& s) {
    const Mat3 M = mass_matrix(p, s);
    const Vec3 qd = {s.x_dot, s.theta1_dot, s.theta2_dot};

    double ke = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ke += 0.5 * qd[i] * M(i, j) * qd[j];

    const double pe = (p.m1 + p.m2) * p.g * p.l1 * (1.0 - std::cos(s.theta1)) +
                      p.m2 * p.g * p.l2 * (1.0 - std::cos(s.theta2));
    return ke + pe;
}

}  // namespace cranectl
