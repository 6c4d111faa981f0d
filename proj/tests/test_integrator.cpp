#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cranectl/dynamics.hpp"
#include "cranectl/integrate.hpp"
#include "oracles.hpp"

using namespace cranectl;

TEST_CASE("zero derivative is a fixed point") {
    auto zero = [](double, const std::array<double, 3>&) {
        return std::array<double, 3>{};
    };
    const std::array<double, 3> y = {1.0, -2.0, 3.5};
    CHECK(rk4_step(zero, 0.0, y, 0.1) == y);
    CHECK(euler_step(zero, 0.0, y, 0.1) == y);
}

TEST_CASE("one RK4 step of y' = y reproduces the degree-4 Taylor polynomial") {
    auto f = [](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{y[0]};
    };
    const double h = 0.1;
    const double expected = 1.0 + h + h * h / 2 + h * h * h / 6 +
                            h * h * h * h / 24;
    const auto y1 = rk4_step(f, 0.0, std::array<double, 1>{1.0}, h);
    CHECK(y1[0] == Catch::Approx(expected).epsilon(1e-15));
}

namespace {

// Linear pendulum theta'' = -(g/l) theta; closed-form cosine solution.
// Error sampled at t = 1 s, a generic phase where the O(dt^4) phase drift
// dominates (at a full period it cancels and the measured order is noisy).
double pendulum_error(double dt) {
    const double g = 9.81, l = 0.7, theta0 = 0.05;
    const double omega = std::sqrt(g / l);
    auto f = [&](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -(g / l) * y[0]};
    };
    const long n = std::lround(1.0 / dt);
    std::array<double, 2> y = {theta0, 0.0};
    for (long i = 0; i < n; ++i) y = rk4_step(f, i * dt, y, dt);
    const double t = n * dt;
    return std::hypot(y[0] - theta0 * std::cos(omega * t),
                      y[1] + theta0 * omega * std::sin(omega * t));
}

}  // namespace

TEST_CASE("linear pendulum over one second is accurate to 1e-6 at dt=1e-3") {
    CHECK(pendulum_error(1e-3) < 1e-6);
}

TEST_CASE("halving dt shrinks the error by roughly 16x (4th order)") {
    const double e1 = pendulum_error(2e-3);
    const double e2 = pendulum_error(1e-3);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("integrate with a zero-step horizon is rejected by config") {
    IntegratorConfig cfg;
    cfg.t_end = 0.0;
    CHECK_FALSE(cfg.valid());
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    CHECK(cfg.valid());
    cfg.dt = 0.02;
    CHECK_FALSE(cfg.valid());
    cfg.dt = 1e-3;
    cfg.t_end = 15.0;
    CHECK(cfg.valid());
    cfg.t_end = 15.0005;  // not a whole number of steps
    CHECK_FALSE(cfg.valid());
}

TEST_CASE("observer fires once per step") {
    auto f = [](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{-y[0]};
    };
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    long calls = 0;
    double last_t = 0.0;
    integrate(f, std::array<double, 1>{1.0}, cfg,
              [&](double t, const std::array<double, 1>&) {
                  ++calls;
                  CHECK(t > last_t);
                  last_t = t;
              });
    CHECK(calls == 100);
    CHECK(last_t == Catch::Approx(1.0));
}

TEST_CASE("blow-up raises NonFiniteState with the failing time") {
    auto f = [](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{y[0] * y[0]};  // finite-time escape
    };
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 5.0;
    try {
        integrate(f, std::array<double, 1>{10.0}, cfg,
                  [](double, const std::array<double, 1>&) {});
        FAIL("expected NonFiniteState");
    } catch (const NonFiniteState& e) {
        CHECK(e.t > 0.0);
        CHECK(e.t <= 5.0);
    }
}

TEST_CASE("open-loop crane drop conserves energy (dt=1e-4, 10 s)") {
    const CraneParams p = oracle::group1();
    std::array<double, 6> y{};
    y[1] = 5.0 * M_PI / 180.0;

    auto f = [&](double, const std::array<double, 6>& yy) {
        const CraneState s{yy[0], yy[1], yy[2], yy[3], yy[4], yy[5]};
        const Vec3 a = accelerations(p, s, 0.0);
        return std::array<double, 6>{yy[3], yy[4], yy[5], a[0], a[1], a[2]};
    };

    const CraneState s0{y[0], y[1], y[2], y[3], y[4], y[5]};
    const double e0 = mechanical_energy(p, s0);
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 10.0;
    double max_drift = 0.0;
    integrate(f, y, cfg, [&](double, const std::array<double, 6>& yy) {
        const CraneState s{yy[0], yy[1], yy[2], yy[3], yy[4], yy[5]};
        max_drift = std::max(max_drift,
                             std::abs(mechanical_energy(p, s) - e0) / e0);
    });
    CHECK(max_drift < 1e-6);
}
