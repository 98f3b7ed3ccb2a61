#pragma once

#include <string>

#include <json.hpp>

#include "divrisk/divergence.hpp"
#include "divrisk/entropy_solver.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/general_solver.hpp"
#include "divrisk/preferences.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

/// Finite doubles serialize as numbers, infinities as "+inf" / "-inf".
inline nlohmann::json json_extended(double v) {
    if (is_pos_inf(v)) return "+inf";
    if (is_neg_inf(v)) return "-inf";
    return v;
}

inline nlohmann::json density_json(const DensityVector& d, const ScenarioSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i)
        arr.push_back({{"id", set[i].id}, {"density", d[i]}});
    return arr;
}

inline nlohmann::json entropy_report_json(const EntropySolveReport& rep, const ScenarioSet* set,
                                          const std::string& divergence) {
    nlohmann::json j;
    j["divergence"] = divergence;
    j["k"] = rep.k;
    j["k_max"] = json_extended(rep.k_max);
    j["case"] = case_tag(rep.case_tag);
    j["value"] = json_extended(rep.value);
    j["model_risk"] = json_extended(rep.model_risk);
    j["attained"] = rep.attained;
    if (rep.theta_bar) j["theta_bar"] = *rep.theta_bar;
    if (rep.worst_density && set) j["worst_density"] = density_json(*rep.worst_density, *set);
    j["residuals"] = {{"tangent", rep.tangent_residual}, {"mass", rep.mass_residual}};
    j["iterations"] = rep.iterations;
    return j;
}

inline nlohmann::json general_report_json(const GeneralSolveReport& rep, const ScenarioSet& set,
                                          const std::string& divergence) {
    nlohmann::json j;
    j["divergence"] = divergence;
    j["k"] = rep.k;
    j["k_max"] = json_extended(rep.k_max);
    j["case"] = case_tag(rep.case_tag);
    j["value"] = json_extended(rep.value);
    j["model_risk"] = json_extended(rep.model_risk);
    j["attained"] = rep.attained;
    if (rep.theta_bar)
        j["theta_bar"] = {{"theta1", rep.theta_bar->t1}, {"theta2", rep.theta_bar->t2}};
    if (rep.b_star) j["b_star"] = *rep.b_star;
    if (rep.worst_density) j["worst_density"] = density_json(*rep.worst_density, set);
    j["residuals"] = {{"mass", rep.residual_mass}, {"constraint", rep.residual_constraint}};
    j["iterations"] = rep.iterations;
    return j;
}

inline nlohmann::json preference_report_json(const PreferenceReport& rep, const ScenarioSet* set,
                                             const std::string& divergence) {
    nlohmann::json j;
    j["divergence"] = divergence;
    j["lambda"] = rep.lambda;
    j["w_value"] = json_extended(rep.w_value);
    j["theta1_star"] = json_extended(rep.theta1_star);
    j["boundary"] = rep.boundary;
    if (rep.minimizing_density && set)
        j["minimizing_density"] = density_json(*rep.minimizing_density, *set);
    j["residuals"] = {{"mass", rep.mass_residual}};
    j["iterations"] = rep.iterations;
    return j;
}

}  // namespace divrisk
