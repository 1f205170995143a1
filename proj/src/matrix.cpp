#include "fleetgame/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fleetgame {

ArcMatrix::ArcMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : nodes_(rows.size()) {
  values_.reserve(nodes_ * nodes_);
  for (const auto& row : rows) {
    if (row.size() != nodes_) throw std::invalid_argument("ArcMatrix: rows must be square");
    values_.insert(values_.end(), row.begin(), row.end());
  }
}

ArcMatrix ArcMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  ArcMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("ArcMatrix: rows must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> ArcMatrix::rows() const {
  std::vector<std::vector<double>> out(nodes_, std::vector<double>(nodes_));
  for (std::size_t i = 0; i < nodes_; ++i)
    for (std::size_t j = 0; j < nodes_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

double ArcMatrix::sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double ArcMatrix::row_sum(std::size_t i) const noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < nodes_; ++j) s += (*this)(i, j);
  return s;
}

double ArcMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs_diff(const ArcMatrix& a, const ArcMatrix& b) { return max_abs_diff(a.values(), b.values()); }

ArcMatrix operator+(const ArcMatrix& a, const ArcMatrix& b) {
  if (a.nodes() != b.nodes()) throw std::invalid_argument("ArcMatrix +: shape mismatch");
  ArcMatrix out(a.nodes());
  for (std::size_t k = 0; k < a.size(); ++k) out.values()[k] = a.values()[k] + b.values()[k];
  return out;
}

ArcMatrix operator-(const ArcMatrix& a, const ArcMatrix& b) {
  if (a.nodes() != b.nodes()) throw std::invalid_argument("ArcMatrix -: shape mismatch");
  ArcMatrix out(a.nodes());
  for (std::size_t k = 0; k < a.size(); ++k) out.values()[k] = a.values()[k] - b.values()[k];
  return out;
}

}  // namespace fleetgame
