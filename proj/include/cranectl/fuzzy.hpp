// Mamdani fuzzy gain tuner: triangular memberships over seven linguistic
// labels, min/max inference over a 7x7 rule grid, weighted-center
// defuzzification, and offset-from-initial gain updates with positivity
// clamping.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cranectl/controller.hpp"

namespace cranectl {

enum class FuzzyLabel : int { NB = 0, NM, NS, ZE, PS, PM, PB };

inline constexpr std::array<const char*, 7> kLabelNames = {
    "NB", "NM", "NS", "ZE", "PS", "PM", "PB"};

/// Label centers, uniformly spaced on the normalized [-1, 1] axis.
inline double label_center(FuzzyLabel l) {
    return (static_cast<int>(l) - 3) / 3.0;
}

inline FuzzyLabel label_from_name(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (name == kLabelNames[i]) return static_cast<FuzzyLabel>(i);
    throw std::invalid_argument("unknown fuzzy label: " + name);
}

/// Input/output domains (half-widths around zero).
struct FuzzyDomains {
    static constexpr double e = 1.0;       ///< displacement error [m]
    static constexpr double e_dot = 0.5;   ///< its rate [m/s]
    static constexpr double dkp = 0.25;
    static constexpr double dkd = 10.0;
    static constexpr double dkl = 0.05;
};

/// Consequent triple for one rule cell.
struct RuleCell {
    FuzzyLabel dkp, dkd, dkl;
};

/// 7x7 rule grid. Rows are indexed by the error-rate label, columns by the
/// displacement-error label (e2 = x - x_d), both ordered NB..PB.
struct FuzzyRuleTable {
    std::array<std::array<RuleCell, 7>, 7> cells{};

    const RuleCell& at(FuzzyLabel row, FuzzyLabel col) const {
        return cells[static_cast<int>(row)][static_cast<int>(col)];
    }
};

/// The built-in rule table, stored verbatim; it is not antisymmetric and no
/// symmetry is assumed anywhere.
inline const FuzzyRuleTable& default_rule_table() {
    static const FuzzyRuleTable table = [] {
        // One "Kp/Kd/Kl" entry per cell, rows top-to-bottom NB..PB.
        static constexpr const char* kRows[7] = {
            "PB/PS/NB PB/PS/NB PM/ZE/PB PM/ZE/ZE PS/ZE/PB PS/PB/NB ZE/PB/NB",
            "PB/NS/NB PB/NS/NB PM/NS/PB PM/NS/ZE PS/ZE/PB ZE/NS/NB ZE/PM/NB",
            "PM/NB/NB PM/NB/NB PM/NM/PB PS/NS/ZE ZE/ZE/PB NS/PS/NB NM/PM/NB",
            "PM/NB/NB PS/NM/NB PS/NM/PB ZE/NS/ZE NS/ZE/PB NM/PS/NB NM/PM/NB",
            "PS/NB/NB PS/NM/NB ZE/NS/PB NS/NS/ZE NS/ZE/PB NM/PS/NB NM/PS/NB",
            "ZE/NM/NB ZE/NS/NB NS/NS/PB NM/NS/ZE NM/ZE/PB NM/PS/NB NB/PS/NB",
            "ZE/PS/NB NS/ZE/NB NS/ZE/PB NM/ZE/ZE NM/ZE/PB NB/PB/NB NB/PB/NB"};
        FuzzyRuleTable t;
        for (int r = 0; r < 7; ++r) {
            std::istringstream row(kRows[r]);
            for (int c = 0; c < 7; ++c) {
                std::string cell;
                row >> cell;
                t.cells[r][c] = {label_from_name(cell.substr(0, 2)),
                                 label_from_name(cell.substr(3, 2)),
                                 label_from_name(cell.substr(6, 2))};
            }
        }
        return t;
    }();
    return table;
}

using Memberships = std::array<double, 7>;

/// Triangular memberships with peaks at {-1, -2/3, ..., 1}, half-width 1/3,
/// saturating shoulders beyond +-1. Adjacent overlap forms a partition of
/// unity. The input must already be clamped to [-1, 1].
inline Memberships fuzzify(double v) {
    Memberships mu{};
    for (int i = 0; i < 7; ++i) {
        const double peak = (i - 3) / 3.0;
        double m = 1.0 - 3.0 * std::abs(v - peak);
        if (i == 0 && v < -1.0) m = 1.0;
        if (i == 6 && v > 1.0) m = 1.0;
        mu[i] = m > 0.0 ? m : 0.0;
    }
    return mu;
}

/// Defuzzified gain increments, already scaled to their output domains.
struct GainDeltas {
    double dkp = 0.0, dkd = 0.0, dkl = 0.0;
};

/// Mamdani inference: firing strength = min(row, column) membership, per-output
/// max-aggregation over rules sharing a consequent label, then weighted
/// average of label centers scaled into the output domain.
inline GainDeltas infer(const FuzzyRuleTable& table, const Memberships& mu_e,
                        const Memberships& mu_e_dot) {
    std::array<std::array<double, 7>, 3> agg{};
    for (int r = 0; r < 7; ++r) {
        if (mu_e_dot[r] == 0.0) continue;
        for (int c = 0; c < 7; ++c) {
            const double w = std::min(mu_e_dot[r], mu_e[c]);
            if (w == 0.0) continue;
            const RuleCell& cell = table.cells[r][c];
            const int idx[3] = {static_cast<int>(cell.dkp),
                                static_cast<int>(cell.dkd),
                                static_cast<int>(cell.dkl)};
            for (int k = 0; k < 3; ++k)
                agg[k][idx[k]] = std::max(agg[k][idx[k]], w);
        }
    }

    const double scale[3] = {FuzzyDomains::dkp, FuzzyDomains::dkd,
                             FuzzyDomains::dkl};
    double out[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 7; ++i) {
            num += agg[k][i] * (i - 3) / 3.0;
            den += agg[k][i];
        }
        // num/den is a convex combination of centers in [-1, 1]; the clamp
        // only strips rounding dust so containment in the domain is exact.
        if (den > 0.0) out[k] = std::clamp(num / den, -1.0, 1.0) * scale[k];
    }
    return {out[0], out[1], out[2]};
}

/// Gains plus the number of clamp interventions applied to keep them positive.
struct TunedGains {
    ControllerGains gains;
    int clamped = 0;
};

/// Gain update: offset from the INITIAL values (not accumulated), clamped
/// below at 1e-4 of each initial value to preserve positivity.
inline TunedGains update_gains(const ControllerGains& base, const GainDeltas& d) {
    constexpr double kFloorFraction = 1e-4;
    TunedGains out{{base.kp + d.dkp, base.kd + d.dkd, base.kl + d.dkl}, 0};

    double* vals[3] = {&out.gains.kp, &out.gains.kd, &out.gains.kl};
    const double base_vals[3] = {base.kp, base.kd, base.kl};
    for (int i = 0; i < 3; ++i) {
        const double floor = kFloorFraction * base_vals[i];
        if (*vals[i] < floor) {
            *vals[i] = floor;
            ++out.clamped;
        }
    }
    return out;
}

/// Canonical text form: 49 lines "ROW COL KP KD KL", rows then columns NB..PB.
inline std::string serialize_rule_table(const FuzzyRuleTable& t) {
    std::ostringstream os;
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) {
            const RuleCell& cell = t.cells[r][c];
            os << kLabelNames[r] << ' ' << kLabelNames[c] << ' '
               << kLabelNames[static_cast<int>(cell.dkp)] << ' '
               << kLabelNames[static_cast<int>(cell.dkd)] << ' '
               << kLabelNames[static_cast<int>(cell.dkl)] << '\n';
        }
    return os.str();
}

/// FNV-1a 64-bit over the canonical serialization; pins the transcription.
inline std::uint64_t rule_table_checksum(const FuzzyRuleTable& t) {
    std::uint64_t h = 14695981039346656037ull;
    for (char ch : serialize_rule_table(t)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

/// Parse an override table: 49 non-empty lines "ROW COL KP KD KL"; '#' starts
/// a comment. Every (row, col) pair must appear exactly once.
inline FuzzyRuleTable parse_rule_table(std::istream& in) {
    FuzzyRuleTable t;
    std::array<std::array<bool, 7>, 7> seen{};
    std::string line;
    int lineno = 0;
    int count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string row, col, kp, kd, kl;
        if (!(ls >> row)) continue;  // blank line
        if (!(ls >> col >> kp >> kd >> kl)) {
            throw std::invalid_argument("rule table line " +
                                        std::to_string(lineno) +
                                        ": expected 'ROW COL KP KD KL'");
        }
        std::string extra;
        if (ls >> extra) {
            throw std::invalid_argument("rule table line " +
                                        std::to_string(lineno) +
                                        ": trailing tokens");
        }
        const int r = static_cast<int>(label_from_name(row));
        const int c = static_cast<int>(label_from_name(col));
        if (seen[r][c]) {
            throw std::invalid_argument("rule table line " +
                                        std::to_string(lineno) +
                                        ": duplicate cell " + row + " " + col);
        }
        seen[r][c] = true;
        t.cells[r][c] = {label_from_name(kp), label_from_name(kd),
                         label_from_name(kl)};
        ++count;
    }
    if (count != 49) {
        throw std::invalid_argument("rule table: expected 49 cells, got " +
                                    std::to_string(count));
    }
    return t;
}

}  // namespace cranectl
