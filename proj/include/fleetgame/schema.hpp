#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fleetgame/errors.hpp"

namespace fleetgame {

using Json = nlohmann::json;

struct SchemaIssue {
  std::string path;  // JSON pointer into the instance, "" for the root
  std::string message;
};

/// Document does not conform to its published schema. `field()` is the path
/// of the first issue.
class SchemaViolation : public ValidationError {
 public:
  explicit SchemaViolation(std::vector<SchemaIssue> issues);
  const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<SchemaIssue> issues_;
};

/// Validates against the JSON Schema keywords used by the shipped schemas:
/// type, enum, const, required, properties, additionalProperties, items,
/// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
/// anyOf, oneOf and local $ref ("#/..."). Unknown keywords are ignored.
std::vector<SchemaIssue> validate_schema(const Json& instance, const Json& schema);

/// Shipped schema by name: "scenario", "sweep", "result", "openapi".
const Json& builtin_schema(std::string_view name);

/// Throws SchemaViolation listing every issue.
void require_schema(const Json& instance, std::string_view schema_name);

}  // namespace fleetgame
