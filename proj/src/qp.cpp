#include "fleetgame/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fleetgame::qp {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNeighbourhood = 1e-3;

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Largest step in (0, 1] keeping v + step * dv >= 0.
double max_step(const VectorXd& v, const VectorXd& dv) {
  double step = 1.0;
  for (Index k = 0; k < v.size(); ++k)
    if (dv(k) < 0.0) step = std::min(step, -v(k) / dv(k));
  return step;
}

struct NewtonSystem {
  MatrixXd kkt;
  Eigen::PartialPivLU<MatrixXd> lu;
  Index n = 0;

  // Returns (dz, dy) solving [H A'; A 0][dz; dy] = [r1; r2], with one step of
  // iterative refinement.
  std::pair<VectorXd, VectorXd> solve(const VectorXd& r1, const VectorXd& r2) const {
    VectorXd rhs(r1.size() + r2.size());
    rhs << r1, r2;
    VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - kkt * sol);
    return {sol.head(n), sol.tail(r2.size())};
  }
};

NewtonSystem factor(const Problem& p, const VectorXd& weights) {
  const Index n = p.variables(), me = p.equalities();
  MatrixXd kkt = MatrixXd::Zero(n + me, n + me);
  kkt.topLeftCorner(n, n) = p.P + p.G.transpose() * weights.asDiagonal() * p.G;
  if (me > 0) {
    kkt.topRightCorner(n, me) = p.A.transpose();
    kkt.bottomLeftCorner(me, n) = p.A;
  }
  Eigen::PartialPivLU<MatrixXd> lu(kkt);
  return {std::move(kkt), std::move(lu), n};
}

bool finite(const VectorXd& v) { return v.allFinite(); }

}  // namespace

Problem Problem::zeros(Index variables, Index equalities, Index inequalities) {
  Problem p;
  p.P = MatrixXd::Zero(variables, variables);
  p.c = VectorXd::Zero(variables);
  p.A = MatrixXd::Zero(equalities, variables);
  p.b = VectorXd::Zero(equalities);
  p.G = MatrixXd::Zero(inequalities, variables);
  p.h = VectorXd::Zero(inequalities);
  return p;
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Solved: return "solved";
    case Status::MaxIterations: return "max-iterations";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

Residuals residuals(const Problem& p, const VectorXd& z, const VectorXd& y, const VectorXd& lambda) {
  Residuals r;
  VectorXd grad = p.P * z + p.c;
  if (p.equalities() > 0) grad += p.A.transpose() * y;
  if (p.inequalities() > 0) grad += p.G.transpose() * lambda;
  r.stationarity = inf_norm(grad);
  if (p.equalities() > 0) r.equality = inf_norm(p.A * z - p.b);
  if (p.inequalities() > 0) {
    const VectorXd slack = p.h - p.G * z;
    r.inequality = std::max(0.0, -slack.minCoeff());
    r.complementarity = inf_norm(lambda.cwiseProduct(slack));
    r.dual_sign = std::max(0.0, -lambda.minCoeff());
  }
  return r;
}

Solution solve(const Problem& p, const Settings& settings) {
  const Index n = p.variables(), me = p.equalities(), mi = p.inequalities();
  Solution sol;
  sol.z = VectorXd::Zero(n);
  sol.y = VectorXd::Zero(me);
  sol.lambda = VectorXd::Zero(mi);

  const double scale_c = 1.0 + inf_norm(p.c);
  const double scale_b = 1.0 + inf_norm(p.b);
  const double scale_h = 1.0 + inf_norm(p.h);
  const double tol = settings.tolerance;

  // Initial point: least-squares-ish primal from the unit-weight system, then
  // push slacks and multipliers into the interior.
  VectorXd s = VectorXd::Ones(mi);
  VectorXd lambda = VectorXd::Ones(mi);
  {
    NewtonSystem sys = factor(p, VectorXd::Ones(mi));
    VectorXd r1 = -p.c;
    if (mi > 0) r1 += p.G.transpose() * p.h;
    auto [z0, y0] = sys.solve(r1, p.b);
    if (finite(z0)) {
      sol.z = z0;
      sol.y = y0;
    }
    if (mi > 0) s = (p.h - p.G * sol.z).cwiseMax(1.0);
  }

  VectorXd& z = sol.z;
  VectorXd& y = sol.y;
  // Residual ratios relative to their targets; the IPM can lose accuracy late
  // when lambda / s spans many orders of magnitude, so the best iterate is kept.
  double best_merit = std::numeric_limits<double>::infinity();
  VectorXd best_z = z, best_y = y, best_lambda = lambda;
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    sol.iterations = iter;
    VectorXd r_d = p.P * z + p.c;
    if (me > 0) r_d += p.A.transpose() * y;
    if (mi > 0) r_d += p.G.transpose() * lambda;
    const VectorXd r_p = me > 0 ? VectorXd(p.A * z - p.b) : VectorXd(0);
    const VectorXd r_i = mi > 0 ? VectorXd(p.G * z + s - p.h) : VectorXd(0);
    const double mu = mi > 0 ? s.dot(lambda) / static_cast<double>(mi) : 0.0;
    const double objective = 0.5 * z.dot(p.P * z) + p.c.dot(z);
    const double comp = mi > 0 ? inf_norm(s.cwiseProduct(lambda)) : 0.0;

    const double merit = std::max({inf_norm(r_d) / scale_c, inf_norm(r_p) / scale_b, inf_norm(r_i) / scale_h,
                                   comp / (1.0 + std::abs(objective))});
    if (merit < best_merit && finite(z) && finite(lambda)) {
      best_merit = merit;
      best_z = z;
      best_y = y;
      best_lambda = lambda;
    }
    if (merit <= tol) {
      sol.status = Status::Solved;
      break;
    }

    const VectorXd weights = mi > 0 ? VectorXd(lambda.cwiseQuotient(s)) : VectorXd(0);
    const NewtonSystem sys = factor(p, weights);

    auto direction = [&](const VectorXd& r_c) {
      VectorXd r1 = -r_d;
      VectorXd correction(mi);
      if (mi > 0) {
        correction = (lambda.cwiseProduct(r_i) - r_c).cwiseQuotient(s);
        r1 -= p.G.transpose() * correction;
      }
      auto [dz, dy] = sys.solve(r1, -r_p);
      VectorXd dlambda(mi), ds(mi);
      if (mi > 0) {
        dlambda = correction + weights.cwiseProduct(p.G * dz);
        ds = -r_i - p.G * dz;
      }
      return std::tuple{dz, dy, ds, dlambda};
    };

    if (mi == 0) {
      auto [dz, dy, ds, dl] = direction(VectorXd(0));
      if (!finite(dz)) break;
      z += dz;
      y += dy;
      continue;
    }

    // Predictor.
    auto [dz_a, dy_a, ds_a, dl_a] = direction(s.cwiseProduct(lambda));
    if (!finite(dz_a) || !finite(dl_a)) break;
    const double step_a = std::min(max_step(s, ds_a), max_step(lambda, dl_a));
    const double mu_aff = (s + step_a * ds_a).dot(lambda + step_a * dl_a) / static_cast<double>(mi);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // Corrector.
    const VectorXd r_c =
        s.cwiseProduct(lambda) + ds_a.cwiseProduct(dl_a) - VectorXd::Constant(mi, sigma * mu);
    auto [dz, dy, ds, dl] = direction(r_c);
    if (!finite(dz) || !finite(dl)) break;
    double step = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(lambda, dl)));
    // Backtrack into a wide neighbourhood of the central path; without it a
    // variable can bounce between its bounds with neither multiplier vanishing.
    for (int back = 0; back < 60; ++back) {
      const VectorXd products = (s + step * ds).cwiseProduct(lambda + step * dl);
      if (products.minCoeff() >= kNeighbourhood * products.mean()) break;
      step *= 0.8;
    }
    if (step < 1e-14) break;
    z += step * dz;
    y += step * dy;
    s += step * ds;
    lambda += step * dl;
    sol.iterations = iter + 1;
  }

  sol.lambda = lambda;
  if (sol.status != Status::Solved) {
    if (std::isfinite(best_merit)) {
      z = best_z;
      y = best_y;
      sol.lambda = best_lambda;
    }
    sol.objective = 0.5 * z.dot(p.P * z) + p.c.dot(z);
    if (!finite(z) || !finite(sol.lambda)) {
      sol.status = Status::NumericalFailure;
    } else {
      // Accept a stalled iterate whose residuals already meet a looser bound.
      const Residuals r = residuals(p, z, y, sol.lambda);
      const double loose = 1e3 * tol;
      const bool ok = r.stationarity <= loose * scale_c && r.equality <= loose * scale_b &&
                      r.inequality <= loose * scale_h && r.complementarity <= loose * (1.0 + std::abs(sol.objective));
      sol.status = ok ? Status::Solved : Status::MaxIterations;
    }
  }
  sol.objective = 0.5 * z.dot(p.P * z) + p.c.dot(z);
  return sol;
}

}  // namespace fleetgame::qp
