// Command line front end: worst-case expected payoff over divergence balls.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divrisk/divrisk.hpp"

namespace {

using namespace divrisk;

int g_exit_code = 0;

struct CommonOpts {
    std::string input;
    std::string format;  // "", "csv", "json"
    std::string analytic;
    std::string divergence = "re";
    std::string config;
    double tol = 1.0;
    int oracle_levels = 6;
    int oracle_grid = 17;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_divergence = true) {
    auto* input = cmd->add_option("--input", o.input, "Scenario file (CSV or JSON)");
    cmd->add_option("--format", o.format, "Override input format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    auto* analytic =
        cmd->add_option("--analytic", o.analytic,
                        "Analytic backend preset: gaussian:<mean>:<sigma>, power32, heavytail");
    analytic->excludes(input);
    if (with_divergence)
        cmd->add_option("--divergence", o.divergence,
                        "Ball: re | power:<alpha> | bregman:<kernel> | "
                        "weighted:<kernel>:<weights-file>");
    cmd->add_option("--tol", o.tol, "Scale factor applied to solver tolerances")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--config", o.config, "key=value file overriding solver settings");
}

SolverOptions make_options(const CommonOpts& o) {
    SolverOptions opts;
    int oracle_levels = o.oracle_levels, oracle_grid = o.oracle_grid;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw std::invalid_argument("cannot open config file '" + o.config + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::string t = detail::trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key=value");
            std::string key = detail::trim(t.substr(0, eq));
            std::string val = detail::trim(t.substr(eq + 1));
            if (key == "tol.root")
                opts.root_tol = detail::parse_double(val, "config tol.root");
            else if (key == "tol.conjugate")
                opts.conjugate_tol = detail::parse_double(val, "config tol.conjugate");
            else if (key == "tol.newton")
                opts.newton_tol = detail::parse_double(val, "config tol.newton");
            else if (key == "max_iter")
                opts.max_iter = static_cast<int>(detail::parse_double(val, "config max_iter"));
            else if (key == "oracle.levels")
                oracle_levels = static_cast<int>(detail::parse_double(val, "config oracle.levels"));
            else if (key == "oracle.grid")
                oracle_grid = static_cast<int>(detail::parse_double(val, "config oracle.grid"));
            else
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unknown key '" + key + "'");
        }
    }
    const_cast<CommonOpts&>(o).oracle_levels = oracle_levels;
    const_cast<CommonOpts&>(o).oracle_grid = oracle_grid;
    return opts.scaled_by(o.tol);
}

ScenarioSet load_set(const CommonOpts& o) {
    if (o.input.empty()) throw std::invalid_argument("--input is required for this command");
    if (o.format.empty()) return load_scenarios_file(o.input);
    std::ifstream in(o.input);
    if (!in) throw std::invalid_argument("cannot open scenario file '" + o.input + "'");
    return load_scenarios(in, o.format == "json" ? ScenarioFormat::Json : ScenarioFormat::Csv);
}

std::vector<double> load_weights_file(const std::string& path, const ScenarioSet& set) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open weights file '" + path + "'");
    std::map<std::string, double> byid;
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        nlohmann::json j;
        in >> j;
        if (!j.is_object()) throw std::invalid_argument("weights json: top level must be an object");
        for (auto& [key, val] : j.items()) {
            if (!val.is_number()) throw std::invalid_argument("weights json: '" + key + "' not a number");
            byid[key] = val.get<double>();
        }
    } else {
        std::string line;
        int lineno = 0;
        bool header = false;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = detail::trim(line);
            if (t.empty()) continue;
            auto cells = detail::split_csv_line(t);
            if (!header) {
                if (cells.size() != 2 || cells[0] != "id" || cells[1] != "weight")
                    throw std::invalid_argument("weights csv: header must be 'id,weight'");
                header = true;
                continue;
            }
            if (cells.size() != 2)
                throw std::invalid_argument("weights csv line " + std::to_string(lineno) +
                                            ": expected 2 fields");
            byid[cells[0]] =
                detail::parse_double(cells[1], "weights csv line " + std::to_string(lineno));
        }
    }
    std::vector<double> w(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto it = byid.find(set[i].id);
        if (it == byid.end())
            throw std::invalid_argument("weights file: missing scenario '" + set[i].id + "'");
        w[i] = it->second;
    }
    return w;
}

ConvexKernel parse_kernel_name(const std::string& name) {
    if (name == "square") return quadratic_kernel();
    if (name == "is") return itakura_saito_kernel();
    if (name == "re") return power_kernel(1.0);
    if (name.rfind("power:", 0) == 0) {
        try {
            return power_kernel(std::stod(name.substr(6)));
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse kernel '" + name + "'");
        }
    }
    throw std::invalid_argument("unknown kernel '" + name +
                                "' (expected square, is, re or power:<alpha>)");
}

DivergenceSpec parse_divergence(const std::string& str, const ScenarioSet& set) {
    if (str == "re") return DivergenceSpec::relative_entropy();
    if (str.rfind("power:", 0) == 0) {
        try {
            return DivergenceSpec::power(std::stod(str.substr(6)));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("cannot parse '" + str + "' (expected power:<alpha>)");
        }
    }
    if (str.rfind("bregman:", 0) == 0) return DivergenceSpec::bregman(parse_kernel_name(str.substr(8)));
    if (str.rfind("weighted:", 0) == 0) {
        std::string rest = str.substr(9);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
            throw std::invalid_argument("expected weighted:<kernel>:<weights-file>");
        ConvexKernel k = parse_kernel_name(rest.substr(0, colon));
        return DivergenceSpec::weighted(std::move(k), load_weights_file(rest.substr(colon + 1), set));
    }
    throw std::invalid_argument("unknown divergence '" + str +
                                "' (expected re, power:<alpha>, bregman:<kernel> or "
                                "weighted:<kernel>:<weights-file>)");
}

std::string tsv_num(double v) {
    if (is_pos_inf(v)) return "inf";
    if (is_neg_inf(v)) return "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct RiskRow {
    double value = 0.0;
    double model_risk = 0.0;
    std::string case_tag;
};

/// One worst-case solve, routed through the entropy or general machinery.
nlohmann::json run_risk(const CommonOpts& o, double k, const SolverOptions& opts,
                        std::string* case_out = nullptr) {
    if (!o.analytic.empty()) {
        if (o.divergence != "re" && o.divergence != "power:1")
            throw std::invalid_argument("analytic backends support only the relative entropy ball");
        auto backend = make_analytic_backend(o.analytic);
        EntropySolveReport rep = solve_vk(*backend, k, opts);
        if (case_out) *case_out = case_tag(rep.case_tag);
        return entropy_report_json(rep, nullptr, o.divergence);
    }
    ScenarioSet set = load_set(o);
    DivergenceSpec spec = parse_divergence(o.divergence, set);
    if (spec.is_entropy_ball()) {
        DiscreteLogMGF backend(set);
        EntropySolveReport rep = solve_vk(backend, k, opts);
        if (case_out) *case_out = case_tag(rep.case_tag);
        return entropy_report_json(rep, backend.scenario_set(), o.divergence);
    }
    GeneralProblem pr(set, make_integrand(spec, set));
    GeneralSolveReport rep = solve(pr, k, opts);
    if (case_out) *case_out = case_tag(rep.case_tag);
    if (rep.case_tag == GeneralCase::InfeasibleKmaxZero) g_exit_code = 2;
    return general_report_json(rep, pr.set(), o.divergence);
}

std::vector<double> parse_grid(const std::string& s, const char* what) {
    auto c1 = s.find(':');
    auto c2 = s.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw std::invalid_argument(std::string(what) + ": expected start:stop:count");
    double start = detail::parse_double(s.substr(0, c1), what);
    double stop = detail::parse_double(s.substr(c1 + 1, c2 - c1 - 1), what);
    int count = static_cast<int>(detail::parse_double(s.substr(c2 + 1), what));
    if (count < 1) throw std::invalid_argument(std::string(what) + ": count must be >= 1");
    if (stop < start) throw std::invalid_argument(std::string(what) + ": stop must be >= start");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return g;
}

void run_frontier(const CommonOpts& o, const std::string& kgrid) {
    SolverOptions opts = make_options(o);
    std::vector<double> ks = parse_grid(kgrid, "--k-grid");
    for (double k : ks)
        if (k < 0.0) throw std::invalid_argument("--k-grid: radii must be >= 0");

    std::vector<RiskRow> rows(ks.size());
    std::exception_ptr err;

    // The backend or problem is shared read-only across the row solves.
    if (!o.analytic.empty()) {
        if (o.divergence != "re" && o.divergence != "power:1")
            throw std::invalid_argument("analytic backends support only the relative entropy ball");
        auto backend = make_analytic_backend(o.analytic);
        auto compute = [&](std::size_t i) {
            EntropySolveReport rep = solve_vk(*backend, ks[i], opts);
            rows[i] = {rep.value, rep.model_risk, case_tag(rep.case_tag)};
        };
        for (std::size_t i = 0; i < ks.size(); ++i) compute(i);
    } else {
        ScenarioSet set = load_set(o);
        DivergenceSpec spec = parse_divergence(o.divergence, set);
        bool entropy = spec.is_entropy_ball();
        std::unique_ptr<DiscreteLogMGF> backend;
        std::unique_ptr<GeneralProblem> problem;
        if (entropy)
            backend = std::make_unique<DiscreteLogMGF>(set);
        else
            problem = std::make_unique<GeneralProblem>(set, make_integrand(spec, set));

        auto compute = [&](std::size_t i) {
            if (entropy) {
                EntropySolveReport rep = solve_vk(*backend, ks[i], opts);
                rows[i] = {rep.value, rep.model_risk, case_tag(rep.case_tag)};
            } else {
                GeneralSolveReport rep = solve(*problem, ks[i], opts);
                rows[i] = {rep.value, rep.model_risk, case_tag(rep.case_tag)};
            }
        };
        unsigned hw = std::thread::hardware_concurrency();
        std::size_t nthreads = std::min<std::size_t>(hw ? hw : 1, ks.size());
        if (nthreads <= 1) {
            for (std::size_t i = 0; i < ks.size(); ++i) compute(i);
        } else {
            std::vector<std::thread> pool;
            std::mutex err_mtx;
            for (std::size_t t = 0; t < nthreads; ++t)
                pool.emplace_back([&, t]() {
                    try {
                        for (std::size_t i = t; i < ks.size(); i += nthreads) compute(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mtx);
                        if (!err) err = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            if (err) std::rethrow_exception(err);
        }
    }

    std::ostringstream out;
    out << "k\tvalue\tmodel_risk\tcase\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
        out << tsv_num(ks[i]) << '\t' << tsv_num(rows[i].value) << '\t'
            << tsv_num(rows[i].model_risk) << '\t' << rows[i].case_tag << '\n';
    std::cout << out.str();
}

void run_lambda_curve(const CommonOpts& o, const std::string& tgrid) {
    std::vector<double> ts = parse_grid(tgrid, "--theta-grid");
    std::shared_ptr<LogMGFBackend> backend;
    if (!o.analytic.empty()) {
        backend = make_analytic_backend(o.analytic);
    } else {
        backend = std::make_shared<DiscreteLogMGF>(load_set(o));
    }
    std::cout << "theta\tlambda\tlambda_prime\tg\n";
    for (double t : ts) {
        double l = backend->lambda(t);
        double lp = is_finite(l) ? backend->lambda_prime(t) : std::nan("");
        double g = tangent_radius(*backend, t);
        std::cout << tsv_num(t) << '\t' << tsv_num(l) << '\t' << tsv_num(lp) << '\t' << tsv_num(g)
                  << '\n';
    }
}

void run_preferences(const CommonOpts& o, double lambda) {
    SolverOptions opts = make_options(o);
    nlohmann::json j;
    if (!o.analytic.empty()) {
        if (o.divergence != "re" && o.divergence != "power:1")
            throw std::invalid_argument("analytic backends support only the relative entropy ball");
        auto backend = make_analytic_backend(o.analytic);
        j = preference_report_json(multiplier_w(*backend, lambda), nullptr, o.divergence);
    } else {
        ScenarioSet set = load_set(o);
        DivergenceSpec spec = parse_divergence(o.divergence, set);
        if (spec.is_entropy_ball()) {
            DiscreteLogMGF backend(set);
            j = preference_report_json(multiplier_w(backend, lambda), backend.scenario_set(),
                                       o.divergence);
        } else {
            GeneralProblem pr(set, make_integrand(spec, set));
            j = preference_report_json(evaluate_w(pr, lambda, opts), &pr.set(), o.divergence);
        }
    }
    std::cout << j.dump(2) << '\n';
}

DensityVector load_density_file(const std::string& path, const ScenarioSet& set) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open density file '" + path + "'");
    std::map<std::string, double> byid;
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        nlohmann::json j;
        in >> j;
        if (!j.is_object()) throw std::invalid_argument("density json: top level must be an object");
        for (auto& [key, val] : j.items()) byid[key] = val.get<double>();
    } else {
        std::string line;
        int lineno = 0;
        bool header = false;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = detail::trim(line);
            if (t.empty()) continue;
            auto cells = detail::split_csv_line(t);
            if (!header) {
                if (cells.size() != 2 || cells[0] != "id" || cells[1] != "density")
                    throw std::invalid_argument("density csv: header must be 'id,density'");
                header = true;
                continue;
            }
            if (cells.size() != 2)
                throw std::invalid_argument("density csv line " + std::to_string(lineno) +
                                            ": expected 2 fields");
            byid[cells[0]] =
                detail::parse_double(cells[1], "density csv line " + std::to_string(lineno));
        }
    }
    DensityVector d;
    d.values.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto it = byid.find(set[i].id);
        if (it == byid.end())
            throw std::invalid_argument("density file: missing scenario '" + set[i].id + "'");
        d.values[i] = it->second;
    }
    validate_density(d, set);
    return d;
}

void run_divergence(const CommonOpts& o, const std::string& density_path) {
    ScenarioSet set = load_set(o);
    DivergenceSpec spec = parse_divergence(o.divergence, set);
    DensityVector p = load_density_file(density_path, set);
    nlohmann::json j;
    j["divergence"] = o.divergence;
    j["value"] = json_extended(divergence_eval(spec, p, set));
    j["mass"] = density_mass(p, set);
    std::cout << j.dump(2) << '\n';
}

void run_oracle(const CommonOpts& o, double k) {
    make_options(o);  // allow config to set oracle.levels / oracle.grid
    ScenarioSet set = load_set(o);
    DivergenceSpec spec = parse_divergence(o.divergence, set);
    auto cost = [&](const DensityVector& p) { return divergence_eval(spec, p, set); };
    oracle::OracleResult res =
        oracle::simplex_min_constrained(set, cost, k, o.oracle_levels, o.oracle_grid);
    nlohmann::json j;
    j["value"] = res.value;
    j["error_bound"] = res.error_bound;
    j["evaluations"] = res.evaluations;
    std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case expected payoff over divergence balls"};
    app.require_subcommand(1);

    CommonOpts ro;
    double rk = 0.0;
    auto* risk = app.add_subcommand("risk", "Worst expected payoff at one radius");
    add_common(risk, ro);
    risk->add_option("--k", rk, "Ball radius")->required()->check(CLI::NonNegativeNumber);
    risk->callback([&]() { std::cout << run_risk(ro, rk, make_options(ro)).dump(2) << '\n'; });

    CommonOpts fo;
    std::string kgrid;
    auto* frontier = app.add_subcommand("frontier", "Sweep radii, TSV output");
    add_common(frontier, fo);
    frontier->add_option("--k-grid", kgrid, "start:stop:count")->required();
    frontier->callback([&]() { run_frontier(fo, kgrid); });

    CommonOpts lo;
    std::string tgrid;
    auto* lcurve = app.add_subcommand("lambda-curve",
                                      "Cumulant function along a tilt grid, TSV output");
    add_common(lcurve, lo, false);
    lcurve->add_option("--theta-grid", tgrid, "start:stop:count")->required();
    lcurve->callback([&]() { run_lambda_curve(lo, tgrid); });

    CommonOpts po;
    double plambda = 1.0;
    auto* prefs = app.add_subcommand("preferences", "Penalized worst-case value");
    add_common(prefs, po);
    prefs->add_option("--lambda", plambda, "Penalty multiplier")
        ->required()
        ->check(CLI::PositiveNumber);
    prefs->callback([&]() { run_preferences(po, plambda); });

    CommonOpts dvo;
    std::string density_path;
    auto* divg = app.add_subcommand("divergence",
                                    "Divergence of a supplied density from the baseline");
    add_common(divg, dvo);
    divg->add_option("--density", density_path, "Density file (CSV id,density or JSON object)")
        ->required();
    divg->callback([&]() { run_divergence(dvo, density_path); });

    CommonOpts oo;
    double ok = 0.0;
    auto* orac = app.add_subcommand("oracle", "Brute-force reference solve");
    orac->group("");  // hidden
    add_common(orac, oo);
    orac->add_option("--k", ok, "Ball radius")->required()->check(CLI::NonNegativeNumber);
    orac->callback([&]() { run_oracle(oo, ok); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return g_exit_code;
}
