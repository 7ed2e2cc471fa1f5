#include "twinbeam/entanglement.hpp"

#include <nlohmann/json.hpp>

namespace twinbeam {

double squeezing_db(double variance, double reference) {
    if (!(variance > 0.0) || !(reference > 0.0)) throw ValidationError("squeezing_db needs positive variance and reference");
    return to_db(variance / reference);
}

EntanglementReport EntanglementReport::from_variances(double var_x_minus, double var_p_plus) {
    EntanglementReport r;
    r.var_x_minus = var_x_minus;
    r.var_p_plus = var_p_plus;
    r.inseparability = var_x_minus + var_p_plus;
    r.squeezing_db_x = squeezing_db(var_x_minus, kJointVacuumVariance);
    r.squeezing_db_p = squeezing_db(var_p_plus, kJointVacuumVariance);
    r.entangled = r.inseparability < kSeparabilityBound - kEntanglementMargin;
    return r;
}

std::string EntanglementReport::to_json() const {
    nlohmann::ordered_json j;
    j["var_x_minus"] = var_x_minus;
    j["var_p_plus"] = var_p_plus;
    j["inseparability"] = inseparability;
    j["squeezing_db_x"] = squeezing_db_x;
    j["squeezing_db_p"] = squeezing_db_p;
    j["entangled"] = entangled;
    return j.dump(2) + "\n";
}

}  // namespace twinbeam
