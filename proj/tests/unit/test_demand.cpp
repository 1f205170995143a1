#include <random>

#include <gtest/gtest.h>

#include "fleetgame/demand.hpp"
#include "fleetgame/errors.hpp"

namespace fleetgame {
namespace {

TEST(Bilinear, ValuesAndGradient) {
  const DemandFunction f = DemandFunction::bilinear();
  EXPECT_DOUBLE_EQ(f.eval(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.eval(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(f.eval(1, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(f.eval(0.6, 0.2), 0.5 * 0.4 * 1.2);
  const ShareGradient g = f.gradient(0.6, 0.2);
  EXPECT_DOUBLE_EQ(g.d_own, -0.5 * 1.2);
  EXPECT_DOUBLE_EQ(g.d_other, 0.5 * 0.4);
  EXPECT_DOUBLE_EQ(f.cross_partial(0.3, 0.9), -0.5);
  const auto affine = f.own_price_affine(0.2);
  ASSERT_TRUE(affine);
  EXPECT_DOUBLE_EQ(affine->intercept, 0.6);
  EXPECT_DOUBLE_EQ(affine->slope, -0.6);
}

TEST(Demand, EvalRejectsPricesOutsideTheUnitSquare) {
  const DemandFunction f = DemandFunction::bilinear();
  EXPECT_THROW(f.eval(-0.01, 0.5), DomainError);
  EXPECT_THROW(f.eval(0.5, 1.01), DomainError);
  EXPECT_NO_THROW(f.eval_unchecked(1.5, 0.5));
}

TEST(Demand, ParseBuiltins) {
  EXPECT_EQ(DemandFunction::parse("bilinear").kind(), DemandFunction::Kind::Bilinear);
  const DemandFunction sl = DemandFunction::parse("separable-linear:g=affine(1,-1),C=0.25");
  EXPECT_EQ(sl.kind(), DemandFunction::Kind::SeparableLinear);
  EXPECT_DOUBLE_EQ(sl.eval(0.4, 0.8), 0.6 + 0.2);
  const DemandFunction sep = DemandFunction::parse("separable:g=quadratic(0.5,-0.25,-0.25),h=power(0.4,0.5)");
  EXPECT_NEAR(sep.eval(0.5, 0.25), 0.5 - 0.125 - 0.0625 + 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(DemandFunction::parse("constant:k=0.3").eval(0.1, 0.9), 0.3);
  EXPECT_DOUBLE_EQ(DemandFunction::parse("own-increasing").eval(0.7, 0.1), 0.7);
}

TEST(Demand, ParseErrors) {
  EXPECT_THROW(DemandFunction::parse("logit"), ValidationError);
  EXPECT_THROW(DemandFunction::parse("separable-linear:g=affine(1,-1)"), ValidationError);
  EXPECT_THROW(DemandFunction::parse("separable-linear:g=affine(1,-1),C=0.2,x=1"), ValidationError);
  EXPECT_THROW(DemandFunction::parse("separable:g=cubic(1),h=affine(0,1)"), ValidationError);
}

TEST(Demand, CustomWithoutGradientFallsBackToFiniteDifferences) {
  const DemandFunction f =
      DemandFunction::custom("sq", [](double a, double b) { return 0.5 * (1 - a * a) + 0.1 * b; });
  EXPECT_FALSE(f.has_analytic_gradient());
  EXPECT_THROW(f.gradient(0.5, 0.5), UnsupportedError);
  const ShareGradient g = f.gradient_or_fd(0.5, 0.5);
  EXPECT_NEAR(g.d_own, -0.5, 1e-6);
  EXPECT_NEAR(g.d_other, 0.1, 1e-6);
}

TEST(Demand, SeparableLinearDetection) {
  EXPECT_EQ(is_separable_linear(DemandFunction::parse("separable-linear:g=affine(1,-1),C=0.25")), 0.25);
  EXPECT_EQ(is_separable_linear(DemandFunction::parse("separable:g=affine(1,-1),h=affine(0,0.3)")), 0.3);
  EXPECT_FALSE(is_separable_linear(DemandFunction::parse("separable:g=affine(1,-1),h=affine(0.1,0.3)")));
  EXPECT_FALSE(is_separable_linear(DemandFunction::bilinear()));
}

// Analytic gradients agree with central differences across the interior.
TEST(DemandProperty, AnalyticGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const char* id : {"bilinear", "separable-linear:g=affine(1,-1),C=0.25",
                         "separable:g=quadratic(0.5,-0.25,-0.25),h=power(0.4,0.5)"}) {
    const DemandFunction f = DemandFunction::parse(id);
    for (int k = 0; k < 200; ++k) {
      const double a = u(rng), b = u(rng);
      const ShareGradient g = f.gradient(a, b), fd = finite_difference_gradient(f, a, b);
      EXPECT_NEAR(g.d_own, fd.d_own, 1e-6) << id;
      EXPECT_NEAR(g.d_other, fd.d_other, 1e-6) << id;
    }
  }
}

TEST(Properties, BilinearPassesEverything) {
  const PropertyReport r = check_properties(DemandFunction::bilinear(), 101);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.results.size(), kPropertyCount);
}

TEST(Properties, ViolationsComeWithWitnesses) {
  const PropertyReport constant = check_properties(DemandFunction::parse("constant"), 21);
  EXPECT_FALSE(constant.at(DemandProperty::P2).pass);
  EXPECT_FALSE(constant.at(DemandProperty::P8).pass);
  EXPECT_FALSE(constant.at(DemandProperty::P2).witnesses.empty());

  const PropertyReport rising = check_properties(DemandFunction::parse("own-increasing"), 21);
  const PropertyResult& p6 = rising.at(DemandProperty::P6);
  EXPECT_FALSE(p6.pass);
  ASSERT_FALSE(p6.witnesses.empty());
  const PropertyWitness& w = p6.witnesses.front();
  ASSERT_TRUE(w.p_own2);
  EXPECT_GT((*w.p_own2 - w.p_own) * (*w.value2 - w.value), 0.0);
}

TEST(Properties, RejectsDegenerateGrid) {
  PropertyCheckOptions o;
  o.grid_resolution = 1;
  EXPECT_THROW(check_properties(DemandFunction::bilinear(), o), std::invalid_argument);
}

TEST(Properties, ParallelMatchesSerialReference) {
  for (const char* id : {"bilinear", "constant:k=0.4", "own-increasing",
                         "separable:g=affine(0.5,-0.5),h=power(0.5,2)"}) {
    const DemandFunction f = DemandFunction::parse(id);
    PropertyCheckOptions o;
    o.grid_resolution = 41;
    const PropertyReport par = check_properties(f, o), ser = check_properties_serial(f, o);
    ASSERT_EQ(par.results.size(), ser.results.size());
    for (std::size_t k = 0; k < par.results.size(); ++k) {
      EXPECT_EQ(par.results[k].pass, ser.results[k].pass) << id << " P" << k + 1;
      EXPECT_EQ(par.results[k].violations, ser.results[k].violations) << id << " P" << k + 1;
      EXPECT_EQ(par.results[k].witnesses, ser.results[k].witnesses) << id << " P" << k + 1;
    }
  }
}

}  // namespace
}  // namespace fleetgame
