// Batch front end for the crane anti-sway simulator.
//
// Verbs: run, compare, sweep, print-config. Scenario files are JSON; outputs
// are records.csv + metrics.json + run.log bundles. Exit codes: 0 success,
// 2 usage, 3 parse/validation, 4 simulation failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cranectl/io.hpp"

namespace fs = std::filesystem;
using namespace cranectl;

namespace {

int log_level() {
    const char* env = std::getenv("CRANE_CTL_LOG");
    if (!env) return 0;
    const std::string v = env;
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[crane-ctl] " << msg << '\n';
}

struct CommonFlags {
    std::string out_dir = "out";
    long decimate = 1;
    double dt = -1.0;
    double t_end = -1.0;
    long seed = 0;  // reserved; dynamics are deterministic
    std::string fuzzy;  // "", "on", "off"
    std::string table_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--out", f.out_dir, "Output directory");
    cmd->add_option("--decimate", f.decimate, "Keep one CSV row per N steps")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dt", f.dt, "Override integrator step size [s]");
    cmd->add_option("--t-end", f.t_end, "Override horizon [s]");
    cmd->add_option("--seed", f.seed,
                    "Reserved, unused (dynamics are deterministic)");
    cmd->add_option("--fuzzy", f.fuzzy, "Force fuzzy tuning on or off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--table", f.table_path, "Fuzzy rule table override file");
}

/// Resolve a scenario argument: a JSON file path or a built-in preset
/// (builtin:fuzzy, builtin:fixed, builtin:pd).
ScenarioConfig resolve_scenario(const std::string& ref) {
    if (ref.empty() || ref == "builtin:fuzzy") {
        ScenarioConfig cfg;
        cfg.scenario.label = "fuzzy-tuned";
        return cfg;
    }
    if (ref == "builtin:fixed") {
        ScenarioConfig cfg;
        cfg.fuzzy_enabled = false;
        cfg.scenario.kind = ControllerKind::FixedGain;
        cfg.scenario.label = "fixed-gain";
        return cfg;
    }
    if (ref == "builtin:pd") {
        ScenarioConfig cfg;
        cfg.scenario.kind = ControllerKind::PdBaseline;
        cfg.scenario.label = "pd-baseline";
        return cfg;
    }
    return load_scenario(ref);
}

void apply_flags(ScenarioConfig& cfg, const CommonFlags& f) {
    if (f.dt > 0) cfg.scenario.integrator.dt = f.dt;
    if (f.t_end > 0) cfg.scenario.integrator.t_end = f.t_end;
    if (!cfg.scenario.integrator.valid())
        throw ValidationError(
            "integrator: need 0 < dt <= 0.01, t_end > 0, t_end/dt whole");
    if (f.fuzzy == "on" && cfg.scenario.kind == ControllerKind::FixedGain) {
        cfg.scenario.kind = ControllerKind::FuzzyTuned;
        cfg.fuzzy_enabled = true;
    } else if (f.fuzzy == "off" &&
               cfg.scenario.kind == ControllerKind::FuzzyTuned) {
        cfg.scenario.kind = ControllerKind::FixedGain;
        cfg.fuzzy_enabled = false;
    }
    if (!f.table_path.empty()) {
        std::ifstream in(f.table_path);
        if (!in) throw ParseError("cannot open rule table: " + f.table_path);
        try {
            cfg.scenario.rules = parse_rule_table(in);
        } catch (const std::invalid_argument& e) {
            throw ParseError(f.table_path + ": " + e.what());
        }
        cfg.table_override_path = f.table_path;
    }
}

std::string run_log(const Scenario& sc, const RunResult& res) {
    std::ostringstream os;
    os << "scenario: " << sc.label << '\n'
       << "controller: " << to_string(sc.kind) << '\n'
       << "params: m=" << format_number(sc.params.m)
       << " m1=" << format_number(sc.params.m1)
       << " m2=" << format_number(sc.params.m2)
       << " l1=" << format_number(sc.params.l1)
       << " l2=" << format_number(sc.params.l2)
       << " g=" << format_number(sc.params.g) << '\n'
       << "target: x_d=" << format_number(sc.x_d) << '\n'
       << "integrator: dt=" << format_number(sc.integrator.dt)
       << " t_end=" << format_number(sc.integrator.t_end)
       << " method=" << (sc.integrator.method == Method::Rk4 ? "rk4" : "euler")
       << '\n'
       << "metric conventions: settling band = 2% of x_d, residual window = "
          "final 2 s\n"
       << "status: " << to_string(res.status);
    if (res.status != RunStatus::Completed)
        os << " at t=" << format_number(res.fail_time);
    os << '\n' << "clamp_events: " << res.metrics.clamp_events << '\n';
    for (const auto& w : res.warnings) os << "warning: " << w << '\n';
    return os.str();
}

/// Run one scenario and write its output bundle. Returns the result.
RunResult write_bundle(const Scenario& sc, const fs::path& dir, long decimate) {
    log_info("running scenario '" + sc.label + "'");
    const RunResult res = run(sc);
    fs::create_directories(dir);
    atomic_write(dir / "records.csv", records_to_csv(res.records, decimate));

    json mj;
    mj["label"] = sc.label;
    mj["status"] = to_string(res.status);
    if (res.status != RunStatus::Completed) mj["fail_time_s"] = res.fail_time;
    mj["metrics"] = metrics_to_json(res.metrics);
    atomic_write(dir / "metrics.json", mj.dump(2) + "\n");
    atomic_write(dir / "run.log", run_log(sc, res));
    return res;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad value: " + tok);
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-pendulum overhead crane anti-sway simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::vector<std::string> scenario_paths;
    std::string axis, values_csv;
    CommonFlags flags;

    CLI::App* cmd_run = app.add_subcommand("run", "Run one scenario");
    cmd_run->add_option("scenario", scenario_path,
                        "Scenario JSON file or builtin:{fuzzy,fixed,pd}");
    add_common_flags(cmd_run, flags);

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Run several scenarios and tabulate");
    cmd_compare
        ->add_option("scenarios", scenario_paths,
                     "Two or more scenario files / builtin presets")
        ->expected(-1);
    add_common_flags(cmd_compare, flags);

    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "Sweep one parameter across values");
    cmd_sweep->add_option("scenario", scenario_path,
                          "Base scenario file or builtin preset");
    cmd_sweep->add_option("--axis", axis, "Parameter to sweep")->required();
    cmd_sweep->add_option("--values", values_csv, "Comma-separated values")
        ->required();
    add_common_flags(cmd_sweep, flags);

    CLI::App* cmd_print =
        app.add_subcommand("print-config", "Echo the fully resolved scenario");
    cmd_print->add_option("scenario", scenario_path,
                          "Scenario JSON file or builtin preset");
    add_common_flags(cmd_print, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        const fs::path out_dir = flags.out_dir;

        if (cmd_run->parsed()) {
            ScenarioConfig cfg = resolve_scenario(scenario_path);
            apply_flags(cfg, flags);
            const RunResult res =
                write_bundle(cfg.scenario, out_dir, flags.decimate);
            if (res.status != RunStatus::Completed) {
                std::cerr << "simulation " << to_string(res.status) << " at t="
                          << format_number(res.fail_time) << " s\n";
                return 4;
            }
            return 0;
        }

        if (cmd_compare->parsed()) {
            if (scenario_paths.size() < 2) {
                std::cerr << "usage error: compare needs at least two scenarios\n";
                return 2;
            }
            std::vector<ScenarioConfig> cfgs;
            std::vector<Scenario> scs;
            for (const auto& p : scenario_paths) {
                ScenarioConfig cfg = resolve_scenario(p);
                apply_flags(cfg, flags);
                scs.push_back(cfg.scenario);
                cfgs.push_back(std::move(cfg));
            }
            check_comparable(scs);

            std::vector<ComparisonEntry> entries;
            for (std::size_t i = 0; i < scs.size(); ++i) {
                const fs::path dir =
                    out_dir / (std::to_string(i) + "-" + scs[i].label);
                const RunResult res = write_bundle(scs[i], dir, flags.decimate);
                entries.push_back({scs[i].label, res.metrics, res.status});
            }
            const ComparisonReport rep = make_comparison(std::move(entries));
            fs::create_directories(out_dir);
            atomic_write(out_dir / "comparison.json",
                         comparison_to_json(rep).dump(2) + "\n");
            atomic_write(out_dir / "comparison.txt", comparison_to_text(rep));
            return 0;
        }

        if (cmd_sweep->parsed()) {
            const auto& axes = sweep_axes();
            if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
                std::cerr << "usage error: unknown axis '" << axis
                          << "'; valid axes:";
                for (const auto& a : axes) std::cerr << ' ' << a;
                std::cerr << '\n';
                return 2;
            }
            std::vector<double> values;
            try {
                values = parse_values(values_csv);
            } catch (const std::invalid_argument& e) {
                std::cerr << "usage error: " << e.what() << '\n';
                return 2;
            }
            if (values.empty()) {
                std::cerr << "usage error: empty values list\n";
                return 2;
            }
            ScenarioConfig cfg = resolve_scenario(scenario_path);
            apply_flags(cfg, flags);
            const SweepResult sw = sweep(cfg.scenario, axis, values);
            fs::create_directories(out_dir);
            atomic_write(out_dir / "sweep.csv", sweep_to_csv(sw));

            long ok = 0;
            for (const auto& row : sw.rows)
                if (row.status == RunStatus::Completed) ++ok;
            if (ok == 0) {
                std::cerr << "all sweep rows failed\n";
                return 4;
            }
            return 0;
        }

        if (cmd_print->parsed()) {
            ScenarioConfig cfg = resolve_scenario(scenario_path);
            apply_flags(cfg, flags);
            std::cout << scenario_to_json(cfg).dump(2) << '\n';
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const MismatchedScenarios& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
