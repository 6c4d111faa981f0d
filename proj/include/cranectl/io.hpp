// Scenario file parsing (strict JSON schema with documented defaults), CSV
// and report serialization, and atomic file writes.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cranectl/harness.hpp"

namespace cranectl {

using json = nlohmann::json;

/// Malformed input file (bad JSON, wrong type, unknown key).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Well-formed input that breaks an invariant; names the offending field.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const char* section,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ParseError(std::string("unknown key '") + key + "' in " +
                             section);
    }
}

inline double get_num(const json& obj, const char* section, const char* key,
                      double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ParseError(std::string(section) + "." + key + " must be a number");
    return v.get<double>();
}

inline void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw ValidationError(std::string(name) + " must be > 0 (got " +
                              std::to_string(v) + ")");
}

}  // namespace detail

inline ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "fuzzy_tuned") return ControllerKind::FuzzyTuned;
    if (s == "fixed_gain") return ControllerKind::FixedGain;
    if (s == "pd_baseline") return ControllerKind::PdBaseline;
    throw ParseError("controller.kind must be one of fuzzy_tuned, fixed_gain, "
                     "pd_baseline (got '" + s + "')");
}

inline const char* to_string(ControllerKind k) {
    switch (k) {
        case ControllerKind::FuzzyTuned: return "fuzzy_tuned";
        case ControllerKind::FixedGain: return "fixed_gain";
        default: return "pd_baseline";
    }
}

struct ScenarioConfig {
    Scenario scenario;
    bool fuzzy_enabled = true;
    std::string table_override_path;
};

/// Parse a scenario document. Missing keys fall back to the defaults (the
/// default-constructed Scenario); unknown keys are rejected.
inline ScenarioConfig scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("scenario document must be an object");
    detail::reject_unknown_keys(doc, "scenario",
                                {"params", "target", "gains", "integrator",
                                 "controller", "label", "v_relative"});

    ScenarioConfig out;
    Scenario& sc = out.scenario;

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        detail::reject_unknown_keys(p, "params", {"m", "m1", "m2", "l1", "l2", "g"});
        sc.params.m = detail::get_num(p, "params", "m", sc.params.m);
        sc.params.m1 = detail::get_num(p, "params", "m1", sc.params.m1);
        sc.params.m2 = detail::get_num(p, "params", "m2", sc.params.m2);
        sc.params.l1 = detail::get_num(p, "params", "l1", sc.params.l1);
        sc.params.l2 = detail::get_num(p, "params", "l2", sc.params.l2);
        sc.params.g = detail::get_num(p, "params", "g", sc.params.g);
    }
    detail::require_positive(sc.params.m, "params.m");
    detail::require_positive(sc.params.m1, "params.m1");
    detail::require_positive(sc.params.m2, "params.m2");
    detail::require_positive(sc.params.l1, "params.l1");
    detail::require_positive(sc.params.l2, "params.l2");
    detail::require_positive(sc.params.g, "params.g");

    if (doc.contains("target")) {
        const json& t = doc.at("target");
        detail::reject_unknown_keys(t, "target", {"x_d"});
        sc.x_d = detail::get_num(t, "target", "x_d", sc.x_d);
    }
    if (!std::isfinite(sc.x_d))
        throw ValidationError("target.x_d must be finite");

    if (doc.contains("gains")) {
        const json& g = doc.at("gains");
        detail::reject_unknown_keys(g, "gains", {"kp0", "kd0", "kl0"});
        sc.gains0.kp = detail::get_num(g, "gains", "kp0", sc.gains0.kp);
        sc.gains0.kd = detail::get_num(g, "gains", "kd0", sc.gains0.kd);
        sc.gains0.kl = detail::get_num(g, "gains", "kl0", sc.gains0.kl);
    }
    detail::require_positive(sc.gains0.kp, "gains.kp0");
    detail::require_positive(sc.gains0.kd, "gains.kd0");
    detail::require_positive(sc.gains0.kl, "gains.kl0");

    if (doc.contains("integrator")) {
        const json& it = doc.at("integrator");
        detail::reject_unknown_keys(it, "integrator", {"dt", "t_end", "method"});
        sc.integrator.dt = detail::get_num(it, "integrator", "dt", sc.integrator.dt);
        sc.integrator.t_end =
            detail::get_num(it, "integrator", "t_end", sc.integrator.t_end);
        if (it.contains("method")) {
            const std::string m = it.at("method").get<std::string>();
            if (m == "rk4") sc.integrator.method = Method::Rk4;
            else if (m == "euler") sc.integrator.method = Method::Euler;
            else throw ParseError("integrator.method must be 'rk4' or 'euler'");
        }
    }
    if (!sc.integrator.valid())
        throw ValidationError(
            "integrator: need 0 < dt <= 0.01, t_end > 0, t_end/dt whole");

    if (doc.contains("controller")) {
        const json& c = doc.at("controller");
        detail::reject_unknown_keys(c, "controller", {"kind", "fuzzy", "pd"});
        if (c.contains("kind"))
            sc.kind = controller_kind_from_string(c.at("kind").get<std::string>());
        if (c.contains("fuzzy")) {
            const json& f = c.at("fuzzy");
            detail::reject_unknown_keys(f, "controller.fuzzy",
                                        {"enabled", "table_override_path"});
            if (f.contains("enabled")) {
                if (!f.at("enabled").is_boolean())
                    throw ParseError("controller.fuzzy.enabled must be a boolean");
                out.fuzzy_enabled = f.at("enabled").get<bool>();
            }
            if (f.contains("table_override_path") &&
                !f.at("table_override_path").is_null())
                out.table_override_path =
                    f.at("table_override_path").get<std::string>();
        }
        if (c.contains("pd")) {
            const json& pd = c.at("pd");
            detail::reject_unknown_keys(pd, "controller.pd", {"kp", "kd"});
            sc.pd.kp = detail::get_num(pd, "controller.pd", "kp", sc.pd.kp);
            sc.pd.kd = detail::get_num(pd, "controller.pd", "kd", sc.pd.kd);
        }
    }
    if (sc.kind == ControllerKind::FuzzyTuned && !out.fuzzy_enabled)
        sc.kind = ControllerKind::FixedGain;
    if (sc.kind == ControllerKind::PdBaseline) {
        detail::require_positive(sc.pd.kp, "controller.pd.kp");
        detail::require_positive(sc.pd.kd, "controller.pd.kd");
    }

    if (doc.contains("label")) sc.label = doc.at("label").get<std::string>();
    if (doc.contains("v_relative")) {
        if (!doc.at("v_relative").is_boolean())
            throw ParseError("v_relative must be a boolean");
        sc.v_relative = doc.at("v_relative").get<bool>();
    }

    if (!out.table_override_path.empty()) {
        std::ifstream in(out.table_override_path);
        if (!in)
            throw ParseError("cannot open rule table override: " +
                             out.table_override_path);
        try {
            sc.rules = parse_rule_table(in);
        } catch (const std::invalid_argument& e) {
            throw ParseError(out.table_override_path + ": " + e.what());
        }
    }
    return out;
}

inline json scenario_to_json(const ScenarioConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    json doc;
    doc["params"] = {{"m", sc.params.m},   {"m1", sc.params.m1},
                     {"m2", sc.params.m2}, {"l1", sc.params.l1},
                     {"l2", sc.params.l2}, {"g", sc.params.g}};
    doc["target"] = {{"x_d", sc.x_d}};
    doc["gains"] = {{"kp0", sc.gains0.kp}, {"kd0", sc.gains0.kd},
                    {"kl0", sc.gains0.kl}};
    doc["integrator"] = {
        {"dt", sc.integrator.dt},
        {"t_end", sc.integrator.t_end},
        {"method", sc.integrator.method == Method::Rk4 ? "rk4" : "euler"}};
    json fuzzy = {{"enabled", cfg.fuzzy_enabled}};
    if (!cfg.table_override_path.empty())
        fuzzy["table_override_path"] = cfg.table_override_path;
    doc["controller"] = {{"kind", to_string(sc.kind)},
                         {"fuzzy", fuzzy},
                         {"pd", {{"kp", sc.pd.kp}, {"kd", sc.pd.kd}}}};
    doc["label"] = sc.label;
    doc["v_relative"] = sc.v_relative;
    return doc;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return scenario_from_json(doc);
}

/// Shortest-of-9-significant-digits formatting; keeps CSV output compact and
/// byte-for-byte reproducible.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Write content atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline const char* kCsvHeader =
    "t,x,x_dot,theta1,theta1_dot,theta2,theta2_dot,u,kp,kd,kl,v,v_dot";

inline std::string records_to_csv(const std::vector<SimRecord>& records,
                                  long decimate = 1) {
    if (decimate < 1) decimate = 1;
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (std::size_t i = 0; i < records.size(); i += decimate) {
        const SimRecord& r = records[i];
        os << format_number(r.t) << ',' << format_number(r.x) << ','
           << format_number(r.x_dot) << ',' << format_number(r.theta1) << ','
           << format_number(r.theta1_dot) << ',' << format_number(r.theta2)
           << ',' << format_number(r.theta2_dot) << ',' << format_number(r.u)
           << ',' << format_number(r.kp) << ',' << format_number(r.kd) << ','
           << format_number(r.kl) << ',' << format_number(r.v) << ','
           << format_number(r.v_dot) << '\n';
    }
    return os.str();
}

inline json metrics_to_json(const Metrics& m) {
    json j;
    if (m.settling_time) j["settling_time_s"] = *m.settling_time;
    else j["settling_time_s"] = "not settled";
    j["settling_band"] = "2% of x_d";
    j["residual_window_s"] = 2.0;
    j["peak_theta1_deg"] = m.peak_theta1_deg;
    j["peak_theta2_deg"] = m.peak_theta2_deg;
    j["residual_theta_deg"] = m.residual_theta_deg;
    j["steady_state_error_m"] = m.steady_state_error;
    j["max_force_N"] = m.max_force;
    j["iae_m_s"] = m.iae;
    j["clamp_events"] = m.clamp_events;
    return j;
}

inline json comparison_to_json(const ComparisonReport& rep) {
    json j;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json je;
        je["label"] = e.label;
        je["status"] = to_string(e.status);
        je["metrics"] = metrics_to_json(e.metrics);
        entries.push_back(je);
    }
    j["entries"] = entries;
    j["winners"] = {{"settling_time", rep.entries[rep.winner_settling].label},
                    {"peak_theta1", rep.entries[rep.winner_peak_theta1].label},
                    {"peak_theta2", rep.entries[rep.winner_peak_theta2].label},
                    {"residual_theta", rep.entries[rep.winner_residual].label},
                    {"steady_state_error", rep.entries[rep.winner_sse].label},
                    {"max_force", rep.entries[rep.winner_max_force].label},
                    {"iae", rep.entries[rep.winner_iae].label}};
    return j;
}

inline std::string comparison_to_text(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "metric";
    for (const auto& e : rep.entries) os << '\t' << e.label;
    os << "\twinner\n";

    auto row = [&](const char* name, auto&& get, int winner) {
        os << name;
        for (const auto& e : rep.entries) os << '\t' << get(e.metrics);
        os << '\t' << rep.entries[winner].label << '\n';
    };
    row("settling_time_s",
        [](const Metrics& m) {
            return m.settling_time ? format_number(*m.settling_time)
                                   : std::string("not settled");
        },
        rep.winner_settling);
    row("peak_theta1_deg",
        [](const Metrics& m) { return format_number(m.peak_theta1_deg); },
        rep.winner_peak_theta1);
    row("peak_theta2_deg",
        [](const Metrics& m) { return format_number(m.peak_theta2_deg); },
        rep.winner_peak_theta2);
    row("residual_theta_deg",
        [](const Metrics& m) { return format_number(m.residual_theta_deg); },
        rep.winner_residual);
    row("steady_state_error_m",
        [](const Metrics& m) { return format_number(m.steady_state_error); },
        rep.winner_sse);
    row("max_force_N",
        [](const Metrics& m) { return format_number(m.max_force); },
        rep.winner_max_force);
    row("iae_m_s", [](const Metrics& m) { return format_number(m.iae); },
        rep.winner_iae);
    return os.str();
}

inline std::string sweep_to_csv(const SweepResult& sw) {
    std::ostringstream os;
    os << sw.axis
       << ",status,settling_time,peak_theta1_deg,peak_theta2_deg,"
          "residual_theta_deg,steady_state_error,max_force,iae,clamp_events,"
          "error\n";
    for (const auto& row : sw.rows) {
        os << format_number(row.value) << ',' << to_string(row.status) << ',';
        if (row.metrics.settling_time)
            os << format_number(*row.metrics.settling_time);
        else
            os << "not settled";
        os << ',' << format_number(row.metrics.peak_theta1_deg) << ','
           << format_number(row.metrics.peak_theta2_deg) << ','
           << format_number(row.metrics.residual_theta_deg) << ','
           << format_number(row.metrics.steady_state_error) << ','
           << format_number(row.metrics.max_force) << ','
           << format_number(row.metrics.iae) << ','
           << row.metrics.clamp_events << ',' << row.error << '\n';
    }
    return os.str();
}

}  // namespace cranectl
