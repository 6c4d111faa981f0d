// Acceptance suite: one numbered criterion per invocation (or all when run
// without arguments). Prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cranectl/harness.hpp"
#include "cranectl/io.hpp"
#include "oracles.hpp"

using namespace cranectl;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
    void note(const std::string& what) {
        detail << (detail.str().empty() ? "" : "; ") << what;
    }
};

double now_elapsed(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

Scenario case1(const CraneParams& p, ControllerKind kind) {
    Scenario sc;
    sc.params = p;
    sc.kind = kind;
    return sc;
}

// ---- criterion 1: open-loop energy conservation -----------------------------
Check criterion1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const CraneParams p = oracle::group1();
    std::array<double, 6> y{};
    y[1] = 5.0 * M_PI / 180.0;
    auto f = [&](double, const std::array<double, 6>& yy) {
        const CraneState s{yy[0], yy[1], yy[2], yy[3], yy[4], yy[5]};
        const Vec3 a = accelerations(p, s, 0.0);
        return std::array<double, 6>{yy[3], yy[4], yy[5], a[0], a[1], a[2]};
    };
    const double e0 = mechanical_energy(p, {0, y[1], 0, 0, 0, 0});
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 10.0;
    double drift = 0.0;
    integrate(f, y, cfg, [&](double, const std::array<double, 6>& yy) {
        const CraneState s{yy[0], yy[1], yy[2], yy[3], yy[4], yy[5]};
        drift = std::max(drift, std::abs(mechanical_energy(p, s) - e0) / e0);
    });
    const double secs = now_elapsed(t0);
    c.require(drift < 1e-6, "drift >= 1e-6");
    c.require(secs < 5.0, "runtime >= 5 s");
    c.detail << "max relative drift " << drift << ", runtime " << secs << " s";
    return c;
}

// ---- criterion 2: dynamics residual oracle ----------------------------------
Check criterion2() {
    Check c;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> force(-50.0, 50.0);
    long double worst = 0.0L;
    for (int i = 0; i < 1000; ++i) {
        const CraneParams p = oracle::random_params(rng);
        const CraneState s = oracle::random_state(rng);
        const double u = force(rng);
        const Vec3 a = accelerations(p, s, u);
        worst = std::max(worst, oracle::max_relative_residual(
                                    p, s, u, {a[0], a[1], a[2]}));
    }
    c.require(worst < 1e-9L, "residual >= 1e-9");
    c.detail << "worst relative residual " << (double)worst;
    return c;
}

// ---- criterion 3: initial-force constraint ----------------------------------
Check criterion3() {
    Check c;
    const CraneParams p = oracle::group1();
    const ControllerGains g{1.5, 250.0, 0.01};
    for (double xd : {0.1, 0.7, 5.0, 50.0}) {
        const ControllerState cs{0.0, 0.0, xd};
        const double u0 = control_force(p, g, cs, {});
        c.require(std::abs(u0) < 13.7143,
                  "|u(0)| >= 13.7143 at x_d=" + std::to_string(xd));
        if (xd == 0.7) {
            c.require(std::abs(u0 - 10.445) < 1e-3, "u(0) != 10.445 +- 1e-3");
            c.detail << "u(0) at x_d=0.7: " << u0;
        }
    }
    return c;
}

// ---- criterion 4: Lyapunov decrease -----------------------------------------
Check criterion4() {
    Check c;
    const RunResult r = run(case1(oracle::group1(), ControllerKind::FuzzyTuned));
    const double dt = 1e-3;

    double vdot_max = -1e300, v_inc_max = -1e300, fd_rel_max = 0.0;
    long fd_checked = 0;
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        vdot_max = std::max(vdot_max, r.records[i].v_dot);
        if (i + 1 < r.records.size()) {
            v_inc_max = std::max(v_inc_max, r.records[i + 1].v - r.records[i].v);
            const double fd = (r.records[i + 1].v - r.records[i].v) / dt;
            if (std::abs(r.records[i].v_dot) > 1e-6) {
                fd_rel_max = std::max(fd_rel_max,
                                      std::abs(fd - r.records[i].v_dot) /
                                          std::abs(r.records[i].v_dot));
                ++fd_checked;
            }
        }
    }
    c.require(vdot_max <= 1e-8, "analytic v_dot > 1e-8 somewhere");
    c.require(v_inc_max <= 1e-9, "V increased by more than 1e-9 in a step");
    c.require(fd_rel_max <= 0.05,
              "finite-difference dV/dt deviates > 5% from analytic v_dot");
    std::ostringstream os;
    os << "max v_dot " << vdot_max << ", max per-step V increase " << v_inc_max
       << ", max FD deviation " << fd_rel_max * 100.0 << "% over " << fd_checked
       << " samples";
    c.note(os.str());
    return c;
}

// ---- criterion 5: Case-1 reproduction ---------------------------------------
Check criterion5() {
    Check c;
    const CraneParams groups[2] = {oracle::group1(), oracle::group2()};
    const char* names[2] = {"group1", "group2"};
    for (int gi = 0; gi < 2; ++gi) {
        const auto t0 = std::chrono::steady_clock::now();
        const RunResult r = run(case1(groups[gi], ControllerKind::FuzzyTuned));
        const double secs = now_elapsed(t0);
        c.require(r.status == RunStatus::Completed,
                  std::string(names[gi]) + " did not complete");

        double worst_pos = 0.0, worst_ang = 0.0;
        for (const auto& rec : r.records) {
            if (rec.t < 13.0) continue;  // final 2 s of the 15 s horizon
            worst_pos = std::max(worst_pos, std::abs(rec.x - 0.7));
            worst_ang = std::max({worst_ang, std::abs(rad2deg(rec.theta1)),
                                  std::abs(rad2deg(rec.theta2))});
        }
        c.require(worst_pos < 0.01,
                  std::string(names[gi]) + " position error >= 0.01 m");
        c.require(worst_ang < 0.5,
                  std::string(names[gi]) + " residual swing >= 0.5 deg");
        c.require(secs < 10.0, std::string(names[gi]) + " runtime >= 10 s");
        c.detail << names[gi] << ": |x-0.7| " << worst_pos << " m, swing "
                 << worst_ang << " deg, " << secs << " s"
                 << (gi == 0 ? "; " : "");
    }
    return c;
}

// ---- criterion 6: comparison direction --------------------------------------
Check criterion6() {
    Check c;
    const RunResult prop = run(case1(oracle::group1(), ControllerKind::FuzzyTuned));
    const RunResult pd = run(case1(oracle::group1(), ControllerKind::PdBaseline));

    c.require(prop.metrics.settling_time.has_value(), "proposed did not settle");
    c.require(pd.metrics.settling_time.has_value(), "PD baseline did not settle");
    if (prop.metrics.settling_time && pd.metrics.settling_time) {
        const double ratio = *pd.metrics.settling_time / *prop.metrics.settling_time;
        c.require(ratio >= 0.8 && ratio <= 1.2,
                  "PD settling not within +-20% of proposed");
        c.detail << "settling proposed " << *prop.metrics.settling_time
                 << " s vs PD " << *pd.metrics.settling_time << " s; ";
    }
    c.require(prop.metrics.peak_theta2_deg < pd.metrics.peak_theta2_deg,
              "proposed peak |theta2| not smaller than PD");
    c.detail << "peak |theta2| proposed " << prop.metrics.peak_theta2_deg
             << " deg vs PD " << pd.metrics.peak_theta2_deg << " deg";
    return c;
}

// ---- criterion 7: fuzzy-system suite ----------------------------------------
Check criterion7() {
    Check c;
    c.require(rule_table_checksum(default_rule_table()) == 0x97bba340c991b0adull,
              "rule table checksum mismatch");

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> in(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Memberships mu = fuzzify(in(rng));
        double sum = 0.0;
        for (double m : mu) sum += m;
        if (std::abs(sum - 1.0) >= 1e-12) {
            c.require(false, "partition of unity violated");
            break;
        }
    }

    const FuzzyRuleTable& t = default_rule_table();
    for (int i = 0; i < 10000; ++i) {
        const GainDeltas d = infer(t, fuzzify(in(rng)), fuzzify(in(rng)));
        if (std::abs(d.dkp) > FuzzyDomains::dkp ||
            std::abs(d.dkd) > FuzzyDomains::dkd ||
            std::abs(d.dkl) > FuzzyDomains::dkl) {
            c.require(false, "defuzzified output escaped its domain");
            break;
        }
    }

    const GainDeltas z = infer(t, fuzzify(0.0), fuzzify(0.0));
    c.require(z.dkp == 0.0 && z.dkl == 0.0 &&
                  std::abs(z.dkd + 10.0 / 3.0) < 1e-14,
              "infer(0,0) != (0, -10/3, 0)");
    std::ostringstream os;
    os << "infer(0,0) = (" << z.dkp << ", " << z.dkd << ", " << z.dkl << ")";
    c.note(os.str());
    return c;
}

// ---- criterion 8: linearization equivalence ---------------------------------
Check criterion8() {
    Check c;
    std::mt19937 rng(888);
    const double deg2 = 2.0 * M_PI / 180.0;
    std::uniform_real_distribution<double> ang(-deg2, deg2);
    std::uniform_real_distribution<double> vel(-0.05, 0.05);
    const CraneParams p = oracle::group1();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CraneState s;
        s.theta1 = ang(rng);
        s.theta2 = ang(rng);
        s.theta1_dot = vel(rng);
        s.theta2_dot = vel(rng);
        const Vec3 full = accelerations(p, s, 0.0);
        const Vec3 lin = accelerations_small_angle(p, s, 0.0);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < 3; ++k) {
            num += (full[k] - lin[k]) * (full[k] - lin[k]);
            den += full[k] * full[k];
        }
        if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
    }
    c.require(worst < 0.01, "relative deviation >= 1%");
    std::ostringstream os;
    os << "worst relative deviation " << worst * 100.0 << "%";
    c.note(os.str());
    return c;
}

// ---- criterion 9: CLI determinism -------------------------------------------
Check criterion9() {
    Check c;
    auto invoke = [](const std::string& out) {
        const std::string cmd = std::string(CRANE_CLI_PATH) + " run --out " +
                                out + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    fs::remove_all("acc9_a");
    fs::remove_all("acc9_b");
    c.require(invoke("acc9_a") == 0, "first invocation failed");
    c.require(invoke("acc9_b") == 0, "second invocation failed");

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const std::string a = slurp("acc9_a/records.csv");
    const std::string b = slurp("acc9_b/records.csv");
    c.require(!a.empty() && a == b, "records.csv differ between invocations");
    c.detail << a.size() << " bytes each";
    return c;
}

// ---- criterion 10: gain positivity under clamping ---------------------------
Check criterion10() {
    Check c;
    const ControllerGains g0{1.5, 250.0, 0.01};
    const double floors[3] = {1e-4 * g0.kp, 1e-4 * g0.kd, 1e-4 * g0.kl};
    long total_clamps = 0;

    auto check_run = [&](const RunResult& r, const std::string& name) {
        for (const auto& rec : r.records) {
            if (rec.kp < floors[0] || rec.kd < floors[1] || rec.kl < floors[2]) {
                c.require(false, name + ": a gain dipped below its clamp floor");
                return;
            }
        }
        total_clamps += r.metrics.clamp_events;
    };

    for (const CraneParams& p : {oracle::group1(), oracle::group2()}) {
        const RunResult r = run(case1(p, ControllerKind::FuzzyTuned));
        check_run(r, "case1");
        // the clamped runs must still meet the criterion-5 thresholds
        double worst_pos = 0.0, worst_ang = 0.0;
        for (const auto& rec : r.records) {
            if (rec.t < 13.0) continue;
            worst_pos = std::max(worst_pos, std::abs(rec.x - 0.7));
            worst_ang = std::max({worst_ang, std::abs(rad2deg(rec.theta1)),
                                  std::abs(rad2deg(rec.theta2))});
        }
        c.require(worst_pos < 0.01 && worst_ang < 0.5,
                  "clamped run missed the Case-1 thresholds");
    }

    const Scenario base = case1(oracle::group1(), ControllerKind::FuzzyTuned);
    for (const auto& [axis, values] :
         std::vector<std::pair<std::string, std::vector<double>>>{
             {"l2", {0.2, 0.3, 0.4, 0.5}}, {"m2", {1.0, 1.5, 2.0, 3.0}}}) {
        Scenario sc = base;
        for (double v : values) {
            if (axis == "l2") sc.params.l2 = v;
            else sc.params.m2 = v;
            check_run(run(sc), axis + "=" + std::to_string(v));
        }
    }
    c.detail << "total clamp events " << total_clamps;
    return c;
}

const char* kDescriptions[10] = {
    "open-loop energy conservation (drift < 1e-6, < 5 s)",
    "dynamics residual oracle (< 1e-9 over 1000 random states)",
    "initial-force constraint (|u(0)| < 13.7143 N; 10.445 N at x_d = 0.7)",
    "Lyapunov decrease along the Case-1 trajectory",
    "Case-1 reproduction for both load groups",
    "proposed controller suppresses peak |theta2| below the matched PD baseline",
    "fuzzy system: transcription checksum, partition of unity, domains, center rule",
    "full vs small-angle accelerations within 1% near the equilibrium",
    "CLI determinism: byte-identical records.csv",
    "gain positivity and clamp accounting across runs and sweeps",
};

}  // namespace

int main(int argc, char** argv) {
    Check (*criteria[10])() = {criterion1, criterion2, criterion3, criterion4,
                               criterion5, criterion6, criterion7, criterion8,
                               criterion9, criterion10};

    int first = 1, last = 10;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 10) {
            std::cerr << "usage: acceptance [1..10]\n";
            return 2;
        }
        first = last = n;
    }

    bool all_ok = true;
    for (int n = first; n <= last; ++n) {
        const Check c = criteria[n - 1]();
        std::cout << "criterion " << n << ": " << (c.ok ? "PASS" : "FAIL")
                  << " - " << kDescriptions[n - 1];
        if (!c.detail.str().empty()) std::cout << " (" << c.detail.str() << ")";
        std::cout << std::endl;
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
