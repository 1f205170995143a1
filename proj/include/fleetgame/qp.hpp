#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace fleetgame::qp {

/// Dense convex quadratic program
///
///   minimize    1/2 z'Pz + c'z
///   subject to  A z  = b
///               G z <= h
///
/// P must be symmetric positive semidefinite and A must have full row rank.
struct Problem {
  Eigen::MatrixXd P;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  Eigen::Index variables() const noexcept { return c.size(); }
  Eigen::Index equalities() const noexcept { return b.size(); }
  Eigen::Index inequalities() const noexcept { return h.size(); }

  /// Zero-initialized problem of the given dimensions.
  static Problem zeros(Eigen::Index variables, Eigen::Index equalities, Eigen::Index inequalities);
};

struct Settings {
  double tolerance = 1e-11;  // scaled residual and duality-gap target
  int max_iterations = 200;
};

enum class Status { Solved, MaxIterations, NumericalFailure };

std::string_view to_string(Status status);

/// Primal-dual solution. Multipliers follow the convention
///   P z + c + A'y + G'lambda = 0,  lambda >= 0,  lambda_k (h - G z)_k = 0.
struct Solution {
  Status status = Status::NumericalFailure;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;
  int iterations = 0;
  double objective = 0.0;

  bool solved() const noexcept { return status == Status::Solved; }
};

struct Residuals {
  double stationarity = 0.0;     // ||P z + c + A'y + G'lambda||_inf
  double equality = 0.0;         // ||A z - b||_inf
  double inequality = 0.0;       // max(G z - h, 0)
  double complementarity = 0.0;  // max |lambda_k (h - G z)_k|
  double dual_sign = 0.0;        // max(-lambda, 0)
};

/// Mehrotra predictor-corrector interior-point method.
Solution solve(const Problem& problem, const Settings& settings = {});

Residuals residuals(const Problem& problem, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& lambda);

}  // namespace fleetgame::qp
