// Fixed-step explicit Runge-Kutta integration for small dense state vectors.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cranectl {

enum class Method { Rk4, Euler };

struct IntegratorConfig {
    double dt = 1e-3;     ///< step size [s], 0 < dt <= 0.01
    double t_end = 15.0;  ///< horizon [s]
    Method method = Method::Rk4;

    /// Number of whole steps; t_end/dt must be whole within rounding.
    long steps() const { return std::lround(t_end / dt); }

    bool valid() const {
        if (!(dt > 0.0 && dt <= 0.01) || !(t_end > 0.0)) return false;
        const double n = t_end / dt;
        return std::abs(n - std::round(n)) < 1e-6 * std::max(1.0, n);
    }
};

/// Integration produced a NaN/Inf component; carries the failing time.
struct NonFiniteState : std::runtime_error {
    double t;
    explicit NonFiniteState(double t_fail)
        : std::runtime_error("non-finite state at t = " + std::to_string(t_fail)),
          t(t_fail) {}
};

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

/// One classic 4-stage RK4 update. Deterministic: identical inputs give
/// bit-identical outputs.
template <std::size_t N, class Deriv>
std::array<double, N> rk4_step(Deriv&& f, double t, const std::array<double, N>& y,
                               double dt) {
    std::array<double, N> k1 = f(t, y);
    std::array<double, N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    std::array<double, N> k2 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    std::array<double, N> k3 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
    std::array<double, N> k4 = f(t + dt, tmp);

    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N, class Deriv>
std::array<double, N> euler_step(Deriv&& f, double t, const std::array<double, N>& y,
                                 double dt) {
    std::array<double, N> k = f(t, y);
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt * k[i];
    return out;
}

template <std::size_t N, class Deriv>
std::array<double, N> step(Method m, Deriv&& f, double t,
                           const std::array<double, N>& y, double dt) {
    std::array<double, N> out = m == Method::Rk4 ? rk4_step(f, t, y, dt)
                                                 : euler_step(f, t, y, dt);
    if (!all_finite(out)) throw NonFiniteState(t + dt);
    return out;
}

/// Apply `step` over the whole horizon, invoking `observer(t, y)` after each
/// step. Returns the final state. Throws NonFiniteState on blow-up.
template <std::size_t N, class Deriv, class Observer>
std::array<double, N> integrate(Deriv&& f, std::array<double, N> y,
                                const IntegratorConfig& cfg, Observer&& observer) {
    const long n = cfg.steps();
    for (long i = 0; i < n; ++i) {
        y = step(cfg.method, f, i * cfg.dt, y, cfg.dt);
        observer((i + 1) * cfg.dt, y);
    }
    return y;
}

}  // namespace cranectl
