#pragma once

// JSON construction of densities, kept out of density.hpp so that header
// stays light. Shape: {"family": string, "params": {...}, "normalize":
// bool, "derivatives": "closed-form"|"fd"}. Mixture:
// {"family": "mixture", "components": [{"density": {...}, "weight": w},
// ...], "normalize": bool}. Unknown keys are rejected.

#include <json.hpp>

#include "hoexp/density.hpp"

namespace hoexp::density {

LocationDensity density_from_json(const nlohmann::json& spec);

// Named presets used by the CLI ("gaussian", "logistic", "student-t",
// "skew-normal", "skew-normal-mild", "mix-skew", "mix-bimodal"), all
// normalized to unit Fisher information.
LocationDensity builtin_density(const std::string& shorthand);
const std::vector<std::string>& builtin_density_names();

}  // namespace hoexp::density
