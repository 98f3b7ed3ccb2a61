#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace divrisk {

/// One state of the world: an identifier, the payoff X(r) of the position in
/// that state, the baseline probability assigned to it, and the mass the
/// reference measure puts on it (1 means plain counting measure).
struct Scenario {
    std::string id;
    double payoff = 0.0;
    double base_prob = 0.0;
    double ref_weight = 1.0;
};

/// Relative tolerance used when deciding that two payoffs coincide.
inline bool payoffs_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Cached aggregates of a scenario set.
struct ScenarioSummary {
    std::size_t count = 0;
    double b0 = 0.0;           // baseline expected payoff
    double min_payoff = 0.0;
    double max_payoff = 0.0;
    double argmin_mass = 0.0;  // baseline probability of the minimal payoff
};

/**
 * @brief Validated, immutable collection of scenarios.
 *
 * Construction enforces: at least one scenario, baseline probabilities
 * nonnegative and summing to 1 within 1e-12, reference weights strictly
 * positive, and at least two distinct payoffs.  A set with all payoffs equal
 * can only be built with allow_degenerate = true; solvers refuse such sets.
 */
class ScenarioSet {
  public:
    static ScenarioSet make(std::vector<Scenario> scenarios, bool allow_degenerate = false) {
        if (scenarios.empty())
            throw std::invalid_argument("scenario set: no scenarios given");
        double total = 0.0;
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const Scenario& s = scenarios[i];
            if (s.id.empty())
                throw std::invalid_argument("scenario " + std::to_string(i) + ": empty id");
            if (!std::isfinite(s.payoff))
                throw std::invalid_argument("scenario '" + s.id + "': payoff must be finite");
            if (!(s.base_prob >= 0.0) || !std::isfinite(s.base_prob))
                throw std::invalid_argument("scenario '" + s.id + "': base_prob must be >= 0");
            if (!(s.ref_weight > 0.0) || !std::isfinite(s.ref_weight))
                throw std::invalid_argument("scenario '" + s.id + "': ref_weight must be > 0");
            total += s.base_prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("scenario set: base_prob sums to " + std::to_string(total) +
                                        ", expected 1");
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            for (std::size_t j = i + 1; j < scenarios.size(); ++j)
                if (scenarios[i].id == scenarios[j].id)
                    throw std::invalid_argument("scenario set: duplicate id '" + scenarios[i].id + "'");

        bool degenerate = true;
        for (const Scenario& s : scenarios)
            if (!payoffs_equal(s.payoff, scenarios.front().payoff)) degenerate = false;
        if (degenerate && !allow_degenerate)
            throw std::invalid_argument("scenario set: all payoffs equal; nothing to optimise");

        return ScenarioSet(std::move(scenarios), degenerate);
    }

    std::size_t size() const { return scenarios_.size(); }
    const Scenario& operator[](std::size_t i) const { return scenarios_[i]; }
    const std::vector<Scenario>& scenarios() const { return scenarios_; }
    bool degenerate() const { return degenerate_; }

    double payoff(std::size_t i) const { return scenarios_[i].payoff; }
    double base_prob(std::size_t i) const { return scenarios_[i].base_prob; }
    double ref_weight(std::size_t i) const { return scenarios_[i].ref_weight; }

    /// Baseline density with respect to the reference measure.
    double baseline_density(std::size_t i) const {
        return scenarios_[i].base_prob / scenarios_[i].ref_weight;
    }

    const ScenarioSummary& summary() const { return summary_; }
    double b0() const { return summary_.b0; }
    double min_payoff() const { return summary_.min_payoff; }
    double max_payoff() const { return summary_.max_payoff; }
    double argmin_mass() const { return summary_.argmin_mass; }

    /// True when payoff(i) attains the set minimum (within tolerance).
    bool at_min(std::size_t i) const { return payoffs_equal(scenarios_[i].payoff, summary_.min_payoff); }

  private:
    ScenarioSet(std::vector<Scenario> scenarios, bool degenerate)
        : scenarios_(std::move(scenarios)), degenerate_(degenerate) {
        summary_.count = scenarios_.size();
        summary_.min_payoff = scenarios_.front().payoff;
        summary_.max_payoff = scenarios_.front().payoff;
        for (const Scenario& s : scenarios_) {
            summary_.b0 += s.payoff * s.base_prob;
            summary_.min_payoff = std::min(summary_.min_payoff, s.payoff);
            summary_.max_payoff = std::max(summary_.max_payoff, s.payoff);
        }
        for (const Scenario& s : scenarios_)
            if (payoffs_equal(s.payoff, summary_.min_payoff)) summary_.argmin_mass += s.base_prob;
    }

    std::vector<Scenario> scenarios_;
    ScenarioSummary summary_;
    bool degenerate_ = false;
};

inline ScenarioSummary summarize(const ScenarioSet& set) { return set.summary(); }

enum class ScenarioFormat { Csv, Json };

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": cannot parse number '" + tok + "'");
    }
    if (pos != tok.size())
        throw std::invalid_argument(where + ": trailing characters in number '" + tok + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace detail

/**
 * @brief Load scenarios from a CSV stream.
 *
 * Expected header: `id,payoff,base_prob` or `id,payoff,base_prob,ref_weight`.
 * Blank lines are skipped.  Parse failures report the 1-based line number.
 */
inline ScenarioSet load_scenarios_csv(std::istream& in, bool allow_degenerate = false) {
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    bool has_weight = false;
    std::vector<Scenario> rows;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        auto cells = detail::split_csv_line(t);
        if (!header_seen) {
            if (cells.size() == 4 && cells[0] == "id" && cells[1] == "payoff" &&
                cells[2] == "base_prob" && cells[3] == "ref_weight")
                has_weight = true;
            else if (cells.size() == 3 && cells[0] == "id" && cells[1] == "payoff" &&
                     cells[2] == "base_prob")
                has_weight = false;
            else
                throw std::invalid_argument(
                    "csv line 1: header must be 'id,payoff,base_prob[,ref_weight]'");
            header_seen = true;
            continue;
        }
        std::string where = "csv line " + std::to_string(lineno);
        if (cells.size() != (has_weight ? 4u : 3u))
            throw std::invalid_argument(where + ": expected " +
                                        std::to_string(has_weight ? 4 : 3) + " fields, got " +
                                        std::to_string(cells.size()));
        Scenario s;
        s.id = cells[0];
        s.payoff = detail::parse_double(cells[1], where + " payoff");
        s.base_prob = detail::parse_double(cells[2], where + " base_prob");
        s.ref_weight = has_weight ? detail::parse_double(cells[3], where + " ref_weight") : 1.0;
        rows.push_back(std::move(s));
    }
    if (!header_seen) throw std::invalid_argument("csv: empty input");
    return ScenarioSet::make(std::move(rows), allow_degenerate);
}

/**
 * @brief Load scenarios from a JSON stream: an array of objects with keys
 * `id`, `payoff`, `base_prob` and optional `ref_weight`.
 */
inline ScenarioSet load_scenarios_json(std::istream& in, bool allow_degenerate = false) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("json: parse error: ") + e.what());
    }
    if (!j.is_array()) throw std::invalid_argument("json: top level must be an array");
    std::vector<Scenario> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& o = j[i];
        std::string where = "json element " + std::to_string(i);
        if (!o.is_object()) throw std::invalid_argument(where + ": not an object");
        if (!o.contains("id") || !o["id"].is_string())
            throw std::invalid_argument(where + ": missing string field 'id'");
        if (!o.contains("payoff") || !o["payoff"].is_number())
            throw std::invalid_argument(where + ": missing numeric field 'payoff'");
        if (!o.contains("base_prob") || !o["base_prob"].is_number())
            throw std::invalid_argument(where + ": missing numeric field 'base_prob'");
        Scenario s;
        s.id = o["id"].get<std::string>();
        s.payoff = o["payoff"].get<double>();
        s.base_prob = o["base_prob"].get<double>();
        if (o.contains("ref_weight")) {
            if (!o["ref_weight"].is_number())
                throw std::invalid_argument(where + ": 'ref_weight' must be numeric");
            s.ref_weight = o["ref_weight"].get<double>();
        }
        rows.push_back(std::move(s));
    }
    return ScenarioSet::make(std::move(rows), allow_degenerate);
}

inline ScenarioSet load_scenarios(std::istream& in, ScenarioFormat fmt,
                                  bool allow_degenerate = false) {
    return fmt == ScenarioFormat::Csv ? load_scenarios_csv(in, allow_degenerate)
                                      : load_scenarios_json(in, allow_degenerate);
}

/// Load from a file, inferring the format from the extension unless given.
inline ScenarioSet load_scenarios_file(const std::string& path, bool allow_degenerate = false) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
    bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return load_scenarios(in, json ? ScenarioFormat::Json : ScenarioFormat::Csv, allow_degenerate);
}

inline void save_scenarios_csv(const ScenarioSet& set, std::ostream& out) {
    out << "id,payoff,base_prob,ref_weight\n";
    out.precision(17);
    for (const Scenario& s : set.scenarios())
        out << s.id << ',' << s.payoff << ',' << s.base_prob << ',' << s.ref_weight << '\n';
}

inline void save_scenarios_json(const ScenarioSet& set, std::ostream& out) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Scenario& s : set.scenarios())
        arr.push_back({{"id", s.id},
                       {"payoff", s.payoff},
                       {"base_prob", s.base_prob},
                       {"ref_weight", s.ref_weight}});
    out << arr.dump(2) << '\n';
}

}  // namespace divrisk
