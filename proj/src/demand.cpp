#include "fleetgame/demand.hpp"

#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "fleetgame/errors.hpp"

namespace fleetgame {
namespace {

constexpr double kFdStep = 1e-6;

void check_price(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(fmt::format("{} = {} is outside the price domain [0, 1]", name, p));
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits on commas that are not nested inside parentheses.
std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '(') ++depth;
    if (s[k] == ')') --depth;
    if (s[k] == ',' && depth == 0) {
      parts.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

double parse_number(std::string_view text, std::string_view context) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw ValidationError(fmt::format("invalid number '{}' in {}", s, context), "demand_function");
  return v;
}

UnivariateTerm parse_term(std::string_view text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw ValidationError(fmt::format("malformed term '{}' (expected name(args))", s), "demand_function");
  const std::string name = s.substr(0, open);
  const auto args = split_top_level(std::string_view(s).substr(open + 1, s.size() - open - 2));
  std::vector<double> v;
  for (const auto& a : args) v.push_back(parse_number(a, s));
  if (name == "affine" && v.size() == 2) return UnivariateTerm::affine(v[0], v[1]);
  if (name == "quadratic" && v.size() == 3) return UnivariateTerm::quadratic(v[0], v[1], v[2]);
  if (name == "power" && v.size() == 2) return UnivariateTerm::power(v[0], v[1]);
  throw ValidationError(fmt::format("unknown term '{}' (expected affine(a,b), quadratic(a,b,c) or power(c,e))", s),
                        "demand_function");
}

// key=value pairs after the "kind:" prefix.
std::vector<std::pair<std::string, std::string>> parse_params(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split_top_level(text)) {
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      throw ValidationError(fmt::format("expected key=value, got '{}'", part), "demand_function");
    out.emplace_back(trim(std::string_view(part).substr(0, eq)), trim(std::string_view(part).substr(eq + 1)));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// UnivariateTerm

UnivariateTerm UnivariateTerm::affine(double a, double b) {
  UnivariateTerm t;
  t.kind_ = Kind::Affine;
  t.c0_ = a;
  t.c1_ = b;
  return t;
}

UnivariateTerm UnivariateTerm::quadratic(double a, double b, double c) {
  UnivariateTerm t;
  t.kind_ = Kind::Quadratic;
  t.c0_ = a;
  t.c1_ = b;
  t.c2_ = c;
  return t;
}

UnivariateTerm UnivariateTerm::power(double c, double e) {
  if (!(e > 0.0)) throw ValidationError("power term exponent must be positive", "demand_function");
  UnivariateTerm t;
  t.kind_ = Kind::Power;
  t.c0_ = c;
  t.c1_ = e;
  return t;
}

UnivariateTerm UnivariateTerm::custom(std::function<double(double)> value, std::function<double(double)> derivative,
                                      std::string label) {
  if (!value) throw ValidationError("custom term needs a value callback", "demand_function");
  UnivariateTerm t;
  t.kind_ = Kind::Custom;
  t.value_fn_ = std::move(value);
  t.derivative_fn_ = std::move(derivative);
  t.label_ = std::move(label);
  return t;
}

double UnivariateTerm::value(double p) const {
  switch (kind_) {
    case Kind::Affine: return c0_ + c1_ * p;
    case Kind::Quadratic: return c0_ + (c1_ + c2_ * p) * p;
    case Kind::Power: return c0_ * std::pow(p, c1_);
    case Kind::Custom: return value_fn_(p);
  }
  return 0.0;
}

double UnivariateTerm::derivative(double p) const {
  switch (kind_) {
    case Kind::Affine: return c1_;
    case Kind::Quadratic: return c1_ + 2.0 * c2_ * p;
    case Kind::Power: return c0_ * c1_ * std::pow(p, c1_ - 1.0);
    case Kind::Custom:
      if (derivative_fn_) return derivative_fn_(p);
      {
        const double lo = std::max(0.0, p - kFdStep), hi = std::min(1.0, p + kFdStep);
        return (value_fn_(hi) - value_fn_(lo)) / (hi - lo);
      }
  }
  return 0.0;
}

bool UnivariateTerm::has_analytic_derivative() const noexcept {
  return kind_ != Kind::Custom || static_cast<bool>(derivative_fn_);
}

std::optional<OwnPriceAffine> UnivariateTerm::as_affine() const {
  switch (kind_) {
    case Kind::Affine: return OwnPriceAffine{c0_, c1_};
    case Kind::Quadratic:
      if (c2_ == 0.0) return OwnPriceAffine{c0_, c1_};
      return std::nullopt;
    case Kind::Power:
      if (c1_ == 1.0) return OwnPriceAffine{0.0, c0_};
      return std::nullopt;
    case Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string UnivariateTerm::describe() const {
  switch (kind_) {
    case Kind::Affine: return fmt::format("affine({},{})", c0_, c1_);
    case Kind::Quadratic: return fmt::format("quadratic({},{},{})", c0_, c1_, c2_);
    case Kind::Power: return fmt::format("power({},{})", c0_, c1_);
    case Kind::Custom: return label_;
  }
  return {};
}

// ---------------------------------------------------------------------------
// DemandFunction

DemandFunction DemandFunction::bilinear() {
  DemandFunction f;
  f.kind_ = Kind::Bilinear;
  f.id_ = "bilinear";
  return f;
}

DemandFunction DemandFunction::separable(UnivariateTerm g, UnivariateTerm h) {
  DemandFunction f;
  f.kind_ = Kind::Separable;
  f.id_ = fmt::format("separable:g={},h={}", g.describe(), h.describe());
  f.g_ = std::move(g);
  f.h_ = std::move(h);
  return f;
}

DemandFunction DemandFunction::separable_linear(UnivariateTerm g, double slope) {
  if (!std::isfinite(slope)) throw ValidationError("separable-linear slope must be finite", "demand_function");
  DemandFunction f;
  f.kind_ = Kind::SeparableLinear;
  f.id_ = fmt::format("separable-linear:g={},C={}", g.describe(), slope);
  f.h_ = UnivariateTerm::affine(0.0, slope);
  f.g_ = std::move(g);
  f.slope_ = slope;
  return f;
}

DemandFunction DemandFunction::custom(std::string id, ShareFn share, GradientFn gradient) {
  if (!share) throw ValidationError("custom demand function needs an evaluation callback", "demand_function");
  DemandFunction f;
  f.kind_ = Kind::Custom;
  f.id_ = std::move(id);
  f.share_ = std::move(share);
  f.gradient_ = std::move(gradient);
  return f;
}

DemandFunction DemandFunction::parse(std::string_view raw) {
  const std::string id = trim(raw);
  const auto colon = id.find(':');
  const std::string kind = id.substr(0, colon);
  const auto params = parse_params(colon == std::string::npos ? std::string_view{} : std::string_view(id).substr(colon + 1));

  auto param = [&](std::string_view key) -> std::optional<std::string> {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nullopt;
  };
  auto reject_unknown = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (auto a : allowed) ok = ok || (k == a);
      if (!ok) throw ValidationError(fmt::format("unknown parameter '{}' for demand function '{}'", k, kind), "demand_function");
    }
  };

  if (kind == "bilinear" && params.empty()) return bilinear();
  if (kind == "constant") {
    reject_unknown({"k"});
    const double k = param("k") ? parse_number(*param("k"), id) : 1.0;
    auto f = custom(
        colon == std::string::npos ? "constant" : fmt::format("constant:k={}", k),
        [k](double, double) { return k; }, [](double, double) { return ShareGradient{0.0, 0.0}; });
    return f;
  }
  if (kind == "own-increasing" && params.empty()) {
    return custom(
        "own-increasing", [](double p, double) { return p; },
        [](double, double) { return ShareGradient{1.0, 0.0}; });
  }
  if (kind == "separable-linear") {
    reject_unknown({"g", "C"});
    if (!param("g") || !param("C"))
      throw ValidationError("separable-linear needs g=<term> and C=<slope>", "demand_function");
    return separable_linear(parse_term(*param("g")), parse_number(*param("C"), id));
  }
  if (kind == "separable") {
    reject_unknown({"g", "h"});
    if (!param("g") || !param("h"))
      throw ValidationError("separable needs g=<term> and h=<term>", "demand_function");
    return separable(parse_term(*param("g")), parse_term(*param("h")));
  }
  std::string known;
  for (const auto& e : builtin_examples()) known += "\n  " + e;
  throw ValidationError(fmt::format("unknown demand function '{}'; built-ins:{}", id, known), "demand_function");
}

std::vector<std::string> DemandFunction::builtin_examples() {
  return {"bilinear",
          "constant[:k=<value>]",
          "own-increasing",
          "separable-linear:g=affine(a,b),C=<c>",
          "separable:g=<term>,h=<term>   (term: affine(a,b) | quadratic(a,b,c) | power(c,e))"};
}

double DemandFunction::eval(double p_own, double p_other) const {
  check_price(p_own, "p_own");
  check_price(p_other, "p_other");
  return eval_unchecked(p_own, p_other);
}

double DemandFunction::eval_unchecked(double p_own, double p_other) const {
  switch (kind_) {
    case Kind::Bilinear: return 0.5 * (1.0 - p_own) * (1.0 + p_other);
    case Kind::Separable:
    case Kind::SeparableLinear: return g_->value(p_own) + h_->value(p_other);
    case Kind::Custom: return share_(p_own, p_other);
  }
  return 0.0;
}

bool DemandFunction::has_analytic_gradient() const noexcept {
  switch (kind_) {
    case Kind::Bilinear: return true;
    case Kind::Separable:
    case Kind::SeparableLinear: return g_->has_analytic_derivative() && h_->has_analytic_derivative();
    case Kind::Custom: return static_cast<bool>(gradient_);
  }
  return false;
}

ShareGradient DemandFunction::gradient(double p_own, double p_other) const {
  switch (kind_) {
    case Kind::Bilinear: return {-0.5 * (1.0 + p_other), 0.5 * (1.0 - p_own)};
    case Kind::Separable:
    case Kind::SeparableLinear:
      if (!has_analytic_gradient())
        throw UnsupportedError(fmt::format("demand function '{}' has no analytic gradient", id_));
      return {g_->derivative(p_own), h_->derivative(p_other)};
    case Kind::Custom:
      if (!gradient_) throw UnsupportedError(fmt::format("demand function '{}' has no analytic gradient", id_));
      return gradient_(p_own, p_other);
  }
  return {};
}

ShareGradient DemandFunction::gradient_or_fd(double p_own, double p_other) const {
  if (has_analytic_gradient()) return gradient(p_own, p_other);
  return finite_difference_gradient(*this, p_own, p_other);
}

double DemandFunction::cross_partial(double p_own, double p_other) const {
  switch (kind_) {
    case Kind::Bilinear: return -0.5;
    case Kind::Separable:
    case Kind::SeparableLinear: return 0.0;
    case Kind::Custom: {
      const double lo = std::max(0.0, p_other - 1e-5), hi = std::min(1.0, p_other + 1e-5);
      return (gradient_or_fd(p_own, hi).d_own - gradient_or_fd(p_own, lo).d_own) / (hi - lo);
    }
  }
  return 0.0;
}

std::optional<OwnPriceAffine> DemandFunction::own_price_affine(double p_other) const {
  switch (kind_) {
    case Kind::Bilinear: {
      const double a = 0.5 * (1.0 + p_other);
      return OwnPriceAffine{a, -a};
    }
    case Kind::Separable:
    case Kind::SeparableLinear: {
      auto g = g_->as_affine();
      if (!g) return std::nullopt;
      return OwnPriceAffine{g->intercept + h_->value(p_other), g->slope};
    }
    case Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

ShareGradient finite_difference_gradient(const DemandFunction& f, double p_own, double p_other, double h) {
  auto diff = [&](auto&& eval_at, double x) {
    const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
    return (eval_at(hi) - eval_at(lo)) / (hi - lo);
  };
  return {diff([&](double v) { return f.eval_unchecked(v, p_other); }, p_own),
          diff([&](double v) { return f.eval_unchecked(p_own, v); }, p_other)};
}

std::optional<double> is_separable_linear(const DemandFunction& f) {
  using Kind = DemandFunction::Kind;
  if (f.kind() != Kind::Separable && f.kind() != Kind::SeparableLinear) return std::nullopt;
  if (auto s = f.linear_slope()) return *s > 0.0 ? std::optional<double>(*s) : std::nullopt;

  const UnivariateTerm& h = *f.other_term();
  if (h.kind() != UnivariateTerm::Kind::Custom) {
    auto affine = h.as_affine();
    if (affine && affine->intercept == 0.0 && affine->slope > 0.0) return affine->slope;
    return std::nullopt;
  }
  // Numerical test for a custom h: h(0) = 0 and vanishing second differences.
  if (std::abs(h.value(0.0)) > 1e-9) return std::nullopt;
  constexpr int kPoints = 101;
  const double step = 1.0 / (kPoints - 1);
  for (int k = 1; k + 1 < kPoints; ++k) {
    const double p = k * step;
    if (std::abs(h.value(p + step) - 2.0 * h.value(p) + h.value(p - step)) > 1e-9) return std::nullopt;
  }
  const double slope = h.value(1.0) - h.value(0.0);
  return slope > 0.0 ? std::optional<double>(slope) : std::nullopt;
}

}  // namespace fleetgame
