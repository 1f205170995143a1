#include <gtest/gtest.h>

#include "fleetgame/io.hpp"
#include "fleetgame/schema.hpp"
#include "oracles.hpp"

namespace fleetgame {
namespace {

Json scenario_doc() { return io::load_file(testing::fixture("scenario-1")); }

TEST(Schema, ValidatorKeywords) {
  const Json schema = Json::parse(R"({
    "type": "object",
    "required": ["a"],
    "additionalProperties": false,
    "properties": {
      "a": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
      "b": {"type": "array", "items": {"$ref": "#/$defs/tag"}, "minItems": 1, "maxItems": 2},
      "c": {"oneOf": [{"type": "string"}, {"type": "integer"}]}
    },
    "$defs": {"tag": {"enum": ["x", "y"]}}
  })");
  EXPECT_TRUE(validate_schema(Json::parse(R"({"a": 0.5, "b": ["x"], "c": 3})"), schema).empty());
  auto issues = validate_schema(Json::parse(R"({"a": 1, "b": ["z"], "d": 1})"), schema);
  std::vector<std::string> paths;
  for (const auto& i : issues) paths.push_back(i.path);
  EXPECT_NE(std::find(paths.begin(), paths.end(), "/a"), paths.end());
  EXPECT_NE(std::find(paths.begin(), paths.end(), "/b/0"), paths.end());
  EXPECT_NE(std::find(paths.begin(), paths.end(), "/d"), paths.end());
  EXPECT_FALSE(validate_schema(Json::parse(R"({"b": []})"), schema).empty());
  EXPECT_FALSE(validate_schema(Json::parse(R"({"a": 0.1, "c": 1.5})"), schema).empty());
}

TEST(Schema, BuiltinsExist) {
  for (const char* name : {"scenario", "sweep", "result", "openapi"}) EXPECT_TRUE(builtin_schema(name).is_object());
  EXPECT_ANY_THROW(builtin_schema("nope"));
}

TEST(ScenarioJson, RoundTripIsStable) {
  const ScenarioSpec spec = io::scenario_from_json(scenario_doc());
  const Json normalized = io::scenario_to_json(spec);
  EXPECT_TRUE(validate_schema(normalized, builtin_schema("scenario")).empty());
  const ScenarioSpec again = io::scenario_from_json(normalized);
  EXPECT_EQ(io::scenario_to_json(again), normalized);
  EXPECT_EQ(again.network.transit_cost_base(), ArcMatrix(2, 0.1));
  EXPECT_DOUBLE_EQ(again.alpha, 0.75);
}

TEST(ScenarioJson, SchemaErrorsCarryAPointer) {
  Json doc = scenario_doc();
  doc["fleet_fraction"] = "half";
  try {
    io::scenario_from_json(doc);
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field(), "/fleet_fraction");
  }
  doc = scenario_doc();
  doc["unexpected"] = 1;
  EXPECT_THROW(io::scenario_from_json(doc), SchemaViolation);
}

TEST(ScenarioJson, SemanticErrorsAreNotSchemaErrors) {
  Json doc = scenario_doc();
  doc["alpha"] = 0.3;
  try {
    io::scenario_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const SchemaViolation&) {
    FAIL() << "alpha range is a semantic check";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "alpha");
  }
}

TEST(ScenarioJson, LoadFileErrors) {
  EXPECT_THROW(io::load_file("/nonexistent/scenario.json"), ValidationError);
}

TEST(ResultJson, ValidatesAndIsDeterministic) {
  const ScenarioSpec spec = io::scenario_from_json(scenario_doc());
  const ScenarioRun run = run_scenario(spec);
  Json doc = io::result_to_json(run.result, run.metrics, spec);
  const auto issues = validate_schema(doc, builtin_schema("result"));
  EXPECT_TRUE(issues.empty()) << (issues.empty() ? "" : issues.front().path + ": " + issues.front().message);
  EXPECT_EQ(doc["schema_version"], io::kSchemaVersion);
  EXPECT_TRUE(doc["converged"].get<bool>());

  const ScenarioRun again = run_scenario(spec);
  Json doc2 = io::result_to_json(again.result, again.metrics, spec);
  doc.erase("generated_at");
  doc2.erase("generated_at");
  EXPECT_EQ(doc.dump(), doc2.dump());
}

TEST(ResultJson, ExitArcsUseOneBasedNodes) {
  ScenarioSpec s;
  s.alpha = 1.0;
  s.fleet_fraction = 0.2;
  s.demand_multiplier = 2.0;
  const ScenarioRun run = run_scenario(s);
  const Json doc = io::result_to_json(run.result, run.metrics, s);
  bool found = false;
  for (const Json& a : doc["players"]["A"]["exit_arcs"]) found = found || (a["from"] == 2 && a["to"] == 1);
  EXPECT_TRUE(found);
}

TEST(SweepJson, TypedAxesAndPaging) {
  const SweepSpec sweep = io::sweep_from_json(io::load_file(testing::fixture("sweep-alpha")));
  const SweepTable table = run_sweep(sweep, 2);
  const Json all = io::sweep_table_to_json(table);
  EXPECT_EQ(all["total_rows"], table.rows.size());
  EXPECT_EQ(all["rows"].size(), table.rows.size());
  const Json page2 = io::sweep_table_to_json(table, {2, 4});
  EXPECT_EQ(page2["page_count"], (table.rows.size() + 3) / 4);
  ASSERT_EQ(page2["rows"].size(), 4u);
  EXPECT_EQ(page2["rows"][0]["index"], 4);
  EXPECT_EQ(page2["rows"][0], all["rows"][4]);
}

TEST(SweepJson, WrongAxisTypeNamesTheValue) {
  Json doc = io::load_file(testing::fixture("sweep-m"));
  doc["axes"][0]["values"][1] = "two";
  try {
    io::sweep_from_json(doc);
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field(), "/axes/0/values/1");
  }
}

TEST(SweepJson, BaseIssuesArePrefixed) {
  Json doc = io::load_file(testing::fixture("sweep-m"));
  doc["base"]["fleet_fraction"] = "x";
  try {
    io::sweep_from_json(doc);
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field().rfind("/base", 0), 0u) << e.field();
  }
}

}  // namespace
}  // namespace fleetgame
