// Closed-loop scenario runner: integrates the 8-dimensional augmented state
// (6 plant states + 2 controller integrals), logs per-step records, computes
// trajectory metrics, and provides comparison and parameter-sweep drivers.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cranectl/controller.hpp"
#include "cranectl/dynamics.hpp"
#include "cranectl/fuzzy.hpp"
#include "cranectl/integrate.hpp"

namespace cranectl {

enum class ControllerKind { FuzzyTuned, FixedGain, PdBaseline };

/// Baseline PD gains, tuned so the baseline settles within +-20% of the
/// proposed controller on the default scenario.
struct PdGains {
    double kp = 13.0;
    double kd = 22.0;
};

struct Scenario {
    CraneParams params;
    double x_d = 0.7;
    ControllerGains gains0;
    IntegratorConfig integrator;
    ControllerKind kind = ControllerKind::FuzzyTuned;
    PdGains pd;
    FuzzyRuleTable rules = default_rule_table();
    bool v_relative = false;  ///< report V minus its equilibrium offset
    std::string label = "default";
};

/// One time sample of the closed loop.
struct SimRecord {
    double t;
    double x, x_dot;
    double theta1, theta1_dot;
    double theta2, theta2_dot;
    double u;
    double kp, kd, kl;
    double v, v_dot;
};

enum class RunStatus { Completed, Unstable, AngleLimit };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Unstable: return "unstable";
        default: return "angle-limit";
    }
}

struct Metrics {
    std::optional<double> settling_time;  ///< 2% band on x - x_d; nullopt = not settled
    double peak_theta1_deg = 0.0;
    double peak_theta2_deg = 0.0;
    double residual_theta_deg = 0.0;  ///< max |theta| over the final 2 s
    double steady_state_error = 0.0;
    double max_force = 0.0;
    double iae = 0.0;  ///< integral of |x - x_d| dt
    long clamp_events = 0;
};

struct RunResult {
    std::vector<SimRecord> records;
    Metrics metrics;
    RunStatus status = RunStatus::Completed;
    double fail_time = 0.0;  ///< valid when status != Completed
    std::vector<std::string> warnings;
};

/// Simple trolley PD stand-in for an external comparison controller.
inline double pd_baseline_force(const CraneState& s, double x_d, double kp_pd,
                                double kd_pd) {
    return -kp_pd * (s.x - x_d) - kd_pd * s.x_dot;
}

inline double rad2deg(double r) { return r * 57.29577951308232; }

inline Metrics compute_metrics(const std::vector<SimRecord>& rec, double x_d,
                               long clamp_events) {
    Metrics m;
    m.clamp_events = clamp_events;
    if (rec.empty()) return m;

    const double band = 0.02 * std::abs(x_d);
    std::size_t last_outside = rec.size();  // sentinel: never outside
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const auto& r = rec[i];
        m.peak_theta1_deg = std::max(m.peak_theta1_deg, std::abs(rad2deg(r.theta1)));
        m.peak_theta2_deg = std::max(m.peak_theta2_deg, std::abs(rad2deg(r.theta2)));
        m.max_force = std::max(m.max_force, std::abs(r.u));
        if (std::abs(r.x - x_d) > band) last_outside = i;
        if (i > 0) {
            const double h = r.t - rec[i - 1].t;
            m.iae += 0.5 * h *
                     (std::abs(r.x - x_d) + std::abs(rec[i - 1].x - x_d));
        }
    }
    if (last_outside == rec.size()) {
        m.settling_time = 0.0;
    } else if (last_outside + 1 < rec.size()) {
        m.settling_time = rec[last_outside + 1].t;
    }  // else: still outside at the end -> not settled

    const double window_start = rec.back().t - 2.0;
    for (const auto& r : rec) {
        if (r.t < window_start) continue;
        m.residual_theta_deg = std::max(
            {m.residual_theta_deg, std::abs(rad2deg(r.theta1)),
             std::abs(rad2deg(r.theta2))});
    }
    m.steady_state_error = std::abs(rec.back().x - x_d);
    return m;
}

namespace detail {

inline CraneState unpack(const std::array<double, 8>& y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5]};
}

}  // namespace detail

/// Integrate the closed loop from rest at the origin. Fuzzy gain updates (if
/// enabled) happen once per integrator step on the step's initial sample;
/// within a step the gains are frozen while the force is re-evaluated at each
/// RK stage. Aborts cleanly on a swing-angle limit or a non-finite state.
inline RunResult run(const Scenario& sc) {
    RunResult out;
    if (!sc.params.valid()) throw std::invalid_argument("invalid crane parameters");
    if (!sc.integrator.valid()) throw std::invalid_argument("invalid integrator config");
    if (initial_force_bound(sc.params, 1.0) <= 0.0) {
        out.warnings.push_back(
            "m <= m2*l2/l1: the initial-force bound argument degenerates");
    }

    const double dt = sc.integrator.dt;
    const long n = sc.integrator.steps();
    out.records.reserve(static_cast<std::size_t>(n) + 1);

    std::array<double, 8> y{};  // x, th1, th2, xd, w1, w2, I1, I2
    ControllerGains gains = sc.gains0;
    long clamps = 0;

    auto force = [&](const ControllerGains& g, const CraneState& s,
                     const ControllerState& cs) {
        if (sc.kind == ControllerKind::PdBaseline)
            return pd_baseline_force(s, sc.x_d, sc.pd.kp, sc.pd.kd);
        return control_force(sc.params, g, cs, s);
    };

    const double v_offset = sc.v_relative ? lyapunov_offset(sc.params) : 0.0;

    for (long i = 0;; ++i) {
        const double t = i * dt;
        const CraneState s = detail::unpack(y);
        const ControllerState cs{y[6], y[7], sc.x_d};

        if (sc.kind == ControllerKind::FuzzyTuned) {
            const double e_n =
                std::clamp(s.x - sc.x_d, -FuzzyDomains::e, FuzzyDomains::e) /
                FuzzyDomains::e;
            const double ed_n =
                std::clamp(s.x_dot, -FuzzyDomains::e_dot, FuzzyDomains::e_dot) /
                FuzzyDomains::e_dot;
            const TunedGains tg =
                update_gains(sc.gains0, infer(sc.rules, fuzzify(e_n), fuzzify(ed_n)));
            gains = tg.gains;
            clamps += tg.clamped;
        }

        const double u = force(gains, s, cs);
        const LyapunovSample ly = lyapunov(sc.params, gains, cs, s);
        out.records.push_back({t, s.x, s.x_dot, s.theta1, s.theta1_dot, s.theta2,
                               s.theta2_dot, u, gains.kp, gains.kd, gains.kl,
                               ly.v - v_offset, ly.v_dot});

        if (!within_swing_limit(s)) {
            out.status = RunStatus::AngleLimit;
            out.fail_time = t;
            break;
        }
        if (i == n) break;

        auto deriv = [&](double, const std::array<double, 8>& yy)
            -> std::array<double, 8> {
            const CraneState ss = detail::unpack(yy);
            const ControllerState ccs{yy[6], yy[7], sc.x_d};
            const Vec3 a = accelerations(sc.params, ss, force(gains, ss, ccs));
            return {ss.x_dot, ss.theta1_dot, ss.theta2_dot, a[0], a[1], a[2],
                    std::sin(ss.theta1), std::sin(ss.theta2)};
        };
        try {
            y = step(sc.integrator.method, deriv, t, y, dt);
        } catch (const NonFiniteState& e) {
            out.status = RunStatus::Unstable;
            out.fail_time = e.t;
            break;
        }
    }

    out.metrics = compute_metrics(out.records, sc.x_d, clamps);
    return out;
}

/// Scenarios passed to compare() must share plant and target.
struct MismatchedScenarios : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ComparisonEntry {
    std::string label;
    Metrics metrics;
    RunStatus status;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    /// Index of the winning entry per metric (lower is better everywhere).
    int winner_settling = 0;
    int winner_peak_theta1 = 0;
    int winner_peak_theta2 = 0;
    int winner_residual = 0;
    int winner_sse = 0;
    int winner_max_force = 0;
    int winner_iae = 0;
};

inline bool same_plant(const CraneParams& a, const CraneParams& b) {
    return a.m == b.m && a.m1 == b.m1 && a.m2 == b.m2 && a.l1 == b.l1 &&
           a.l2 == b.l2 && a.g == b.g;
}

inline void check_comparable(const std::vector<Scenario>& scenarios) {
    if (scenarios.size() < 2)
        throw std::invalid_argument("compare needs at least two scenarios");
    for (const auto& sc : scenarios) {
        if (!same_plant(sc.params, scenarios.front().params) ||
            sc.x_d != scenarios.front().x_d) {
            throw MismatchedScenarios(
                "compared scenarios must share plant parameters and target");
        }
    }
}

inline ComparisonReport make_comparison(std::vector<ComparisonEntry> entries) {
    ComparisonReport rep;
    rep.entries = std::move(entries);

    auto argmin = [&](auto&& key) {
        int best = 0;
        for (int i = 1; i < static_cast<int>(rep.entries.size()); ++i)
            if (key(rep.entries[i].metrics) < key(rep.entries[best].metrics))
                best = i;
        return best;
    };
    auto settle_or_inf = [](const Metrics& m) {
        return m.settling_time ? *m.settling_time
                               : std::numeric_limits<double>::infinity();
    };
    rep.winner_settling = argmin(settle_or_inf);
    rep.winner_peak_theta1 = argmin([](const Metrics& m) { return m.peak_theta1_deg; });
    rep.winner_peak_theta2 = argmin([](const Metrics& m) { return m.peak_theta2_deg; });
    rep.winner_residual = argmin([](const Metrics& m) { return m.residual_theta_deg; });
    rep.winner_sse = argmin([](const Metrics& m) { return m.steady_state_error; });
    rep.winner_max_force = argmin([](const Metrics& m) { return m.max_force; });
    rep.winner_iae = argmin([](const Metrics& m) { return m.iae; });
    return rep;
}

inline ComparisonReport compare(const std::vector<Scenario>& scenarios) {
    check_comparable(scenarios);
    std::vector<ComparisonEntry> entries;
    for (const auto& sc : scenarios) {
        const RunResult r = run(sc);
        entries.push_back({sc.label, r.metrics, r.status});
    }
    return make_comparison(std::move(entries));
}

struct SweepRow {
    double value;
    RunStatus status;
    Metrics metrics;       ///< valid when status == Completed (partial otherwise)
    std::string error;     ///< non-empty when the run threw
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes = {"m2", "l2", "l1", "m1", "x_d"};
    return axes;
}

/// One run per value along the named parameter axis; per-row failures are
/// recorded without aborting the sweep.
inline SweepResult sweep(const Scenario& base, const std::string& axis,
                         const std::vector<double>& values) {
    const auto& axes = sweep_axes();
    if (std::find(axes.begin(), axes.end(), axis) == axes.end())
        throw std::invalid_argument("unknown sweep axis: " + axis);
    if (values.empty()) throw std::invalid_argument("empty sweep value list");

    SweepResult out;
    out.axis = axis;
    for (double v : values) {
        Scenario sc = base;
        if (axis == "m2") sc.params.m2 = v;
        else if (axis == "l2") sc.params.l2 = v;
        else if (axis == "l1") sc.params.l1 = v;
        else if (axis == "m1") sc.params.m1 = v;
        else sc.x_d = v;

        SweepRow row{v, RunStatus::Completed, {}, {}};
        try {
            const RunResult r = run(sc);
            row.status = r.status;
            row.metrics = r.metrics;
        } catch (const std::exception& e) {
            row.status = RunStatus::Unstable;
            row.error = e.what();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace cranectl
