#pragma once

#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/protocol_sim.hpp"
#include "cvprivacy/security.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace cvprivacy {

// State files:
//
//     {"n_modes": 2, "cov": [[...], ...], "disp": [...]}
//
// cov is 2n x 2n in (X1, P1, X2, P2, ...) order; disp is optional and
// defaults to zero. Violations throw SchemaError naming the offending
// path, e.g. "cov[2][1]: expected a number".

GaussianState parse_state_json(std::string_view text);
GaussianState load_state_file(const std::filesystem::path& path);
std::string state_to_json(const GaussianState& s);

std::string report_to_json(const SecurityReport& r);
/// With `fit`, the slope fit is included under "slope".
std::string simulation_to_json(const SimulationResult& r, const SlopeFit* fit = nullptr);
std::string slope_to_json(const SlopeFit& fit);

/// Rows "N,eps_BN,se" (header included), one per block length.
std::string simulation_csv(const SimulationResult& r);

}  // namespace cvprivacy
