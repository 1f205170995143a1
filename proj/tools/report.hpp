#pragma once

#include <string>

#include "fleetgame/demand.hpp"
#include "fleetgame/equilibrium.hpp"
#include "fleetgame/harness.hpp"
#include "fleetgame/potential.hpp"

namespace fleetgame::cli {

/// Row-major matrix with `decimals` digits, e.g. [[0.6016, 0.5000], [...]].
std::string format_matrix(const ArcMatrix& m, int decimals);
std::string format_vector(const NodeVector& v, int decimals);

/// Per-player blocks of prices (4 d.p.) and flows (1 d.p.).
std::string summary_table(const RunMetrics& metrics, const EquilibriumResult& result);

std::string property_table(const PropertyReport& report);
std::string potential_verdict(const PotentialDecision& decision);

}  // namespace fleetgame::cli
