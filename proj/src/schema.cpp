#include "fleetgame/schema.hpp"

#include <map>
#include <mutex>

#include <fmt/format.h>

namespace fleetgame {

namespace detail {
const std::map<std::string_view, std::string_view>& embedded_schemas();
}

namespace {

std::string summarize(const std::vector<SchemaIssue>& issues) {
  std::string out = "schema validation failed";
  for (const auto& i : issues) out += fmt::format("\n  {}: {}", i.path.empty() ? "/" : i.path, i.message);
  return out;
}

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

bool has_type(const Json& v, std::string_view type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer")
    return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(
                                                                                    static_cast<long long>(v.get<double>())));
  return false;
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void run(const Json& v, const Json& s, const std::string& path, std::vector<SchemaIssue>& out) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) out.push_back({path, "no value is allowed here"});
      return;
    }
    if (!s.is_object()) return;
    if (auto ref = s.find("$ref"); ref != s.end()) {
      run(v, resolve(ref->get<std::string>()), path, out);
      return;
    }
    if (auto t = s.find("type"); t != s.end()) {
      bool ok = false;
      if (t->is_string()) ok = has_type(v, t->get<std::string>());
      else
        for (const auto& alt : *t) ok = ok || has_type(v, alt.get<std::string>());
      if (!ok) {
        out.push_back({path, fmt::format("expected {}, got {}", t->is_string() ? t->get<std::string>() : t->dump(),
                                         v.type_name())});
        return;
      }
    }
    if (auto e = s.find("enum"); e != s.end()) {
      bool found = false;
      for (const auto& option : *e) found = found || option == v;
      if (!found) out.push_back({path, fmt::format("must be one of {}", e->dump())});
    }
    if (auto c = s.find("const"); c != s.end() && *c != v) out.push_back({path, fmt::format("must equal {}", c->dump())});
    if (v.is_number()) numeric(v.get<double>(), s, path, out);
    if (v.is_object()) object(v, s, path, out);
    if (v.is_array()) array(v, s, path, out);
    if (auto any = s.find("anyOf"); any != s.end()) {
      bool matched = false;
      for (const auto& alt : *any) {
        std::vector<SchemaIssue> scratch;
        run(v, alt, path, scratch);
        if (scratch.empty()) {
          matched = true;
          break;
        }
      }
      if (!matched) out.push_back({path, "does not match any allowed form"});
    }
    if (auto one = s.find("oneOf"); one != s.end()) {
      int matches = 0;
      for (const auto& alt : *one) {
        std::vector<SchemaIssue> scratch;
        run(v, alt, path, scratch);
        matches += scratch.empty();
      }
      if (matches != 1) out.push_back({path, fmt::format("must match exactly one allowed form (matched {})", matches)});
    }
  }

 private:
  const Json& resolve(const std::string& ref) const {
    if (ref.rfind("#", 0) != 0) throw UnsupportedError(fmt::format("only local $ref is supported (got '{}')", ref));
    return root_.at(Json::json_pointer(ref.substr(1)));
  }

  static void numeric(double x, const Json& s, const std::string& path, std::vector<SchemaIssue>& out) {
    if (auto m = s.find("minimum"); m != s.end() && x < m->get<double>())
      out.push_back({path, fmt::format("must be >= {} (got {})", m->get<double>(), x)});
    if (auto m = s.find("maximum"); m != s.end() && x > m->get<double>())
      out.push_back({path, fmt::format("must be <= {} (got {})", m->get<double>(), x)});
    if (auto m = s.find("exclusiveMinimum"); m != s.end() && x <= m->get<double>())
      out.push_back({path, fmt::format("must be > {} (got {})", m->get<double>(), x)});
    if (auto m = s.find("exclusiveMaximum"); m != s.end() && x >= m->get<double>())
      out.push_back({path, fmt::format("must be < {} (got {})", m->get<double>(), x)});
  }

  void object(const Json& v, const Json& s, const std::string& path, std::vector<SchemaIssue>& out) const {
    if (auto req = s.find("required"); req != s.end())
      for (const auto& key : *req)
        if (!v.contains(key.get<std::string>()))
          out.push_back({path + "/" + escape_token(key.get<std::string>()), "is required"});
    const auto props = s.find("properties");
    const auto extra = s.find("additionalProperties");
    for (const auto& [key, value] : v.items()) {
      const std::string child = path + "/" + escape_token(key);
      if (props != s.end() && props->contains(key)) {
        run(value, props->at(key), child, out);
      } else if (extra != s.end()) {
        if (extra->is_boolean() && !extra->get<bool>()) out.push_back({child, "is not an allowed property"});
        else run(value, *extra, child, out);
      }
    }
  }

  void array(const Json& v, const Json& s, const std::string& path, std::vector<SchemaIssue>& out) const {
    if (auto m = s.find("minItems"); m != s.end() && v.size() < m->get<std::size_t>())
      out.push_back({path, fmt::format("needs at least {} item(s)", m->get<std::size_t>())});
    if (auto m = s.find("maxItems"); m != s.end() && v.size() > m->get<std::size_t>())
      out.push_back({path, fmt::format("allows at most {} item(s)", m->get<std::size_t>())});
    if (auto items = s.find("items"); items != s.end())
      for (std::size_t k = 0; k < v.size(); ++k) run(v[k], *items, fmt::format("{}/{}", path, k), out);
  }

  const Json& root_;
};

}  // namespace

SchemaViolation::SchemaViolation(std::vector<SchemaIssue> issues)
    : ValidationError(summarize(issues), issues.empty() ? std::string() : issues.front().path),
      issues_(std::move(issues)) {}

std::vector<SchemaIssue> validate_schema(const Json& instance, const Json& schema) {
  std::vector<SchemaIssue> out;
  Validator(schema).run(instance, schema, "", out);
  return out;
}

const Json& builtin_schema(std::string_view name) {
  static std::mutex lock;
  static std::map<std::string, Json, std::less<>> parsed;
  std::lock_guard guard(lock);
  if (auto it = parsed.find(name); it != parsed.end()) return it->second;
  const auto& raw = detail::embedded_schemas();
  const auto it = raw.find(name);
  if (it == raw.end()) throw UnsupportedError(fmt::format("no schema named '{}'", name));
  return parsed.emplace(std::string(name), Json::parse(it->second)).first->second;
}

void require_schema(const Json& instance, std::string_view schema_name) {
  auto issues = validate_schema(instance, builtin_schema(schema_name));
  if (!issues.empty()) throw SchemaViolation(std::move(issues));
}

}  // namespace fleetgame
