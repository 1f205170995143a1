#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fleetgame {

/// Partial derivatives of a market-share function at (p_own, p_other).
struct ShareGradient {
  double d_own = 0.0;
  double d_other = 0.0;
};

/// f(p_own, p_other) = intercept + slope * p_own for a fixed opponent price.
struct OwnPriceAffine {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Univariate component g or h of a separable demand function.
class UnivariateTerm {
 public:
  enum class Kind { Affine, Quadratic, Power, Custom };

  /// a + b p
  static UnivariateTerm affine(double a, double b);
  /// a + b p + c p^2
  static UnivariateTerm quadratic(double a, double b, double c);
  /// c p^e, e > 0
  static UnivariateTerm power(double c, double e);
  static UnivariateTerm custom(std::function<double(double)> value,
                               std::function<double(double)> derivative = {},
                               std::string label = "custom");

  Kind kind() const noexcept { return kind_; }
  double value(double p) const;
  /// Analytic derivative; central difference for custom terms without one.
  double derivative(double p) const;
  bool has_analytic_derivative() const noexcept;
  /// (intercept, slope) when the term is exactly affine.
  std::optional<OwnPriceAffine> as_affine() const;
  std::string describe() const;

 private:
  UnivariateTerm() = default;
  Kind kind_ = Kind::Affine;
  double c0_ = 0.0, c1_ = 0.0, c2_ = 0.0;  // coefficients, or (coef, exponent) for Power
  std::function<double(double)> value_fn_;
  std::function<double(double)> derivative_fn_;
  std::string label_;
};

/// Market-share map (p_own, p_other) -> share on the unit square. Player A's
/// share is f(p_A, p_B); player B's is f(p_B, p_A). Copyable value type;
/// evaluation is reentrant.
class DemandFunction {
 public:
  enum class Kind { Bilinear, Separable, SeparableLinear, Custom };

  using ShareFn = std::function<double(double, double)>;
  using GradientFn = std::function<ShareGradient(double, double)>;

  /// f = (1 - p_own)(1 + p_other) / 2
  static DemandFunction bilinear();
  /// f = g(p_own) + h(p_other)
  static DemandFunction separable(UnivariateTerm g, UnivariateTerm h);
  /// f = g(p_own) + slope * p_other
  static DemandFunction separable_linear(UnivariateTerm g, double slope);
  static DemandFunction custom(std::string id, ShareFn share, GradientFn gradient = {});

  /// Built-in identifiers: "bilinear", "constant[:k=v]", "own-increasing",
  /// "separable-linear:g=<term>,C=<c>", "separable:g=<term>,h=<term>" with
  /// <term> one of affine(a,b), quadratic(a,b,c), power(c,e).
  static DemandFunction parse(std::string_view id);
  static std::vector<std::string> builtin_examples();

  Kind kind() const noexcept { return kind_; }
  const std::string& id() const noexcept { return id_; }

  /// Domain-checked evaluation; throws DomainError outside [0, 1]^2.
  double eval(double p_own, double p_other) const;
  double eval_unchecked(double p_own, double p_other) const;

  /// Analytic partials; throws UnsupportedError for a custom function
  /// supplied without a gradient callback.
  ShareGradient gradient(double p_own, double p_other) const;
  bool has_analytic_gradient() const noexcept;
  /// Analytic gradient when available, central differences otherwise.
  ShareGradient gradient_or_fd(double p_own, double p_other) const;

  /// Mixed partial d^2 f / dp_own dp_other (analytic for built-ins).
  double cross_partial(double p_own, double p_other) const;

  /// Affine-in-own-price representation at a fixed opponent price, when the
  /// function has one (bilinear; separable with affine g).
  std::optional<OwnPriceAffine> own_price_affine(double p_other) const;

  const UnivariateTerm* own_term() const noexcept { return g_ ? &*g_ : nullptr; }
  const UnivariateTerm* other_term() const noexcept { return h_ ? &*h_ : nullptr; }
  std::optional<double> linear_slope() const noexcept { return slope_; }

 private:
  DemandFunction() = default;
  Kind kind_ = Kind::Bilinear;
  std::string id_;
  std::optional<UnivariateTerm> g_;
  std::optional<UnivariateTerm> h_;
  std::optional<double> slope_;
  ShareFn share_;
  GradientFn gradient_;
};

/// Central-difference gradient with step `h`, one-sided at the boundary.
ShareGradient finite_difference_gradient(const DemandFunction& f, double p_own, double p_other,
                                         double h = 1e-6);

/// Returns C when f = g(p_own) + C p_other with C > 0; empty otherwise.
std::optional<double> is_separable_linear(const DemandFunction& f);

// ---------------------------------------------------------------------------
// Axiom checking

enum class DemandProperty { P1 = 1, P2, P3, P4, P5, P6, P7, P8, P9 };
inline constexpr std::size_t kPropertyCount = 9;

std::string_view describe(DemandProperty property);

struct PropertyWitness {
  double p_own = 0.0;
  double p_other = 0.0;
  double value = 0.0;
  /// Second evaluation point for two-point properties (P2, P4-P7).
  std::optional<double> p_own2, p_other2, value2;

  friend bool operator==(const PropertyWitness&, const PropertyWitness&) = default;
};

struct PropertyResult {
  DemandProperty property = DemandProperty::P1;
  bool pass = true;
  std::size_t violations = 0;               // total failing points/pairs
  std::vector<PropertyWitness> witnesses;   // first few in grid order
};

struct PropertyReport {
  std::size_t grid_resolution = 0;
  std::size_t random_samples = 0;
  std::vector<PropertyResult> results;  // P1..P9 in order

  bool all_pass() const noexcept;
  const PropertyResult& at(DemandProperty property) const;
};

struct PropertyCheckOptions {
  std::size_t grid_resolution = 101;
  std::size_t random_samples = 256;
  std::uint64_t seed = 0x5eed;
  double equality_tol = 1e-12;
  double monotone_slack = 1e-12;
  std::size_t max_witnesses = 16;
};

/// Evaluates P1-P9 on a uniform grid over [0,1]^2 plus seeded random points.
/// OpenMP-parallel over the grid; results are identical to the serial
/// reference below.
PropertyReport check_properties(const DemandFunction& f, const PropertyCheckOptions& options = {});
PropertyReport check_properties(const DemandFunction& f, std::size_t grid_resolution);

/// Single-threaded reference implementation of check_properties.
PropertyReport check_properties_serial(const DemandFunction& f, const PropertyCheckOptions& options = {});

}  // namespace fleetgame
