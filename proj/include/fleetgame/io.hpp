#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "fleetgame/equilibrium.hpp"
#include "fleetgame/harness.hpp"
#include "fleetgame/scenario.hpp"
#include "fleetgame/schema.hpp"

namespace fleetgame::io {

inline constexpr int kSchemaVersion = 1;

/// Reads and parses a JSON file; throws ValidationError on I/O or syntax errors.
Json load_file(const std::filesystem::path& path);

/// Schema-checks the document (SchemaViolation), then builds and validates the
/// spec (ValidationError / UnsupportedError for semantic problems).
ScenarioSpec scenario_from_json(const Json& doc);
/// Normalized form: every field present, network costs as full matrices.
Json scenario_to_json(const ScenarioSpec& spec);

SweepSpec sweep_from_json(const Json& doc);

Json strategy_to_json(const Strategy& strategy);
Json kkt_to_json(const KktDiagnostics& kkt);
Json metrics_to_json(const RunMetrics& metrics);

/// Full result document (validates against the "result" schema). The only
/// non-deterministic field is `generated_at`.
Json result_to_json(const EquilibriumResult& result, const RunMetrics& metrics, const ScenarioSpec& spec);

struct Page {
  std::size_t page = 1;  // 1-based
  std::size_t page_size = 0;  // 0 returns every row
};

Json sweep_table_to_json(const SweepTable& table, const Page& page = {});

/// UTC timestamp in ISO 8601 form.
std::string timestamp_now();

}  // namespace fleetgame::io
