#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fleetgame {

/// Dense square matrix indexed by arc (i, j) of the complete digraph with
/// self-loops. Storage is row-major.
class ArcMatrix {
 public:
  ArcMatrix() = default;
  explicit ArcMatrix(std::size_t nodes, double fill = 0.0)
      : nodes_(nodes), values_(nodes * nodes, fill) {}
  ArcMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static ArcMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * nodes_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * nodes_ + j]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::vector<std::vector<double>> rows() const;

  double sum() const noexcept;
  double row_sum(std::size_t i) const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const ArcMatrix&, const ArcMatrix&) = default;

 private:
  std::size_t nodes_ = 0;
  std::vector<double> values_;
};

using NodeVector = std::vector<double>;

/// Max-norm distance between two matrices of the same shape.
double max_abs_diff(const ArcMatrix& a, const ArcMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

ArcMatrix operator+(const ArcMatrix& a, const ArcMatrix& b);
ArcMatrix operator-(const ArcMatrix& a, const ArcMatrix& b);

}  // namespace fleetgame
