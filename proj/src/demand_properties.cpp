#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fleetgame/demand.hpp"

namespace fleetgame {
namespace {

// Random probes shared by both implementations. Drawn up-front from one
// seeded engine so the serial and parallel paths see identical points.
struct RandomProbes {
  std::vector<std::pair<double, double>> points;  // (p_own, p_other)
  std::vector<std::array<double, 3>> pairs;       // (hi, lo, fixed) with hi > lo
};

RandomProbes draw_probes(const PropertyCheckOptions& opt) {
  RandomProbes probes;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < opt.random_samples; ++k) {
    const double a = unit(rng), b = unit(rng), c = unit(rng);
    probes.points.emplace_back(a, b);
    probes.pairs.push_back({std::max(a, b), std::min(a, b), c});
  }
  return probes;
}

double grid_point(std::size_t k, std::size_t resolution) {
  return static_cast<double>(k) / static_cast<double>(resolution - 1);
}

// Violation sink that keeps the first `limit` witnesses in insertion order.
struct Sink {
  std::size_t limit = 0;
  std::size_t count = 0;
  std::vector<PropertyWitness> witnesses;

  void add(PropertyWitness w) {
    ++count;
    if (witnesses.size() < limit) witnesses.push_back(std::move(w));
  }
  void append(const Sink& other) {
    count += other.count;
    for (const auto& w : other.witnesses)
      if (witnesses.size() < limit) witnesses.push_back(w);
  }
};

PropertyWitness one_point(double a, double b, double v) { return {a, b, v, {}, {}, {}}; }
PropertyWitness two_point(double a, double b, double v, double a2, double b2, double v2) {
  return {a, b, v, a2, b2, v2};
}

PropertyReport assemble(const PropertyCheckOptions& opt, std::array<Sink, kPropertyCount>& sinks) {
  PropertyReport report;
  report.grid_resolution = opt.grid_resolution;
  report.random_samples = opt.random_samples;
  for (std::size_t k = 0; k < kPropertyCount; ++k) {
    PropertyResult r;
    r.property = static_cast<DemandProperty>(k + 1);
    r.violations = sinks[k].count;
    r.witnesses = std::move(sinks[k].witnesses);
    r.pass = r.violations == 0;
    report.results.push_back(std::move(r));
  }
  return report;
}

void validate(const PropertyCheckOptions& opt) {
  if (opt.grid_resolution < 2) throw std::invalid_argument("grid_resolution must be >= 2");
}

// Runs `row(k, sink)` for k in [0, rows) and concatenates the per-row sinks in
// row order, so the witness list is independent of the thread schedule.
template <typename RowFn>
Sink scan_rows(std::size_t rows, std::size_t limit, bool parallel, RowFn&& row) {
  std::vector<Sink> per_row(rows, Sink{limit, 0, {}});
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) row(static_cast<std::size_t>(k), per_row[static_cast<std::size_t>(k)]);
  Sink out{limit, 0, {}};
  for (const auto& s : per_row) out.append(s);
  return out;
}

}  // namespace

std::string_view describe(DemandProperty property) {
  switch (property) {
    case DemandProperty::P1: return "0 <= f(pA,pB) <= 1";
    case DemandProperty::P2: return "f(pA,pB) + f(pB,pA) <= 1";
    case DemandProperty::P3: return "equal prices give equal shares; f(0,0) = 1/2";
    case DemandProperty::P4: return "f(p,p) non-increasing in p";
    case DemandProperty::P5: return "pA > pB implies f(pA,pB) <= f(pB,pA)";
    case DemandProperty::P6: return "share non-increasing in own price";
    case DemandProperty::P7: return "share non-decreasing in competitor price";
    case DemandProperty::P8: return "f(1,pB) = 0";
    case DemandProperty::P9: return "f(0,1) = 1";
  }
  return "?";
}

bool PropertyReport::all_pass() const noexcept {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.pass; });
}

const PropertyResult& PropertyReport::at(DemandProperty property) const {
  return results.at(static_cast<std::size_t>(property) - 1);
}

PropertyReport check_properties_serial(const DemandFunction& f, const PropertyCheckOptions& opt) {
  validate(opt);
  const std::size_t n = opt.grid_resolution;
  const double tol = opt.equality_tol, slack = opt.monotone_slack;
  const auto t = [n](std::size_t k) { return grid_point(k, n); };
  const auto F = [&f](double a, double b) { return f.eval_unchecked(a, b); };
  const RandomProbes probes = draw_probes(opt);

  std::array<Sink, kPropertyCount> s;
  for (auto& sink : s) sink.limit = opt.max_witnesses;
  auto& p1 = s[0]; auto& p2 = s[1]; auto& p3 = s[2]; auto& p4 = s[3]; auto& p5 = s[4];
  auto& p6 = s[5]; auto& p7 = s[6]; auto& p8 = s[7]; auto& p9 = s[8];

  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const double v = F(t(k), t(l));
      if (v < -slack || v > 1.0 + slack) p1.add(one_point(t(k), t(l), v));
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const double v = F(t(k), t(l)), w = F(t(l), t(k));
      if (v + w > 1.0 + slack) p2.add(two_point(t(k), t(l), v, t(l), t(k), w));
    }
  if (const double v = F(0.0, 0.0); std::abs(v - 0.5) > tol) p3.add(one_point(0.0, 0.0, v));
  for (std::size_t k = 0; k < n; ++k) {
    const double v = F(t(k), t(k)), w = F(t(k), t(k));
    if (std::abs(v - w) > tol) p3.add(two_point(t(k), t(k), v, t(k), t(k), w));
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      const double lo = F(t(k), t(k)), hi = F(t(l), t(l));
      if (hi > lo + slack) p4.add(two_point(t(k), t(k), lo, t(l), t(l), hi));
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < k; ++l) {
      const double v = F(t(k), t(l)), w = F(t(l), t(k));
      if (v > w + slack) p5.add(two_point(t(k), t(l), v, t(l), t(k), w));
    }
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < k; ++j) {
        const double hi = F(t(k), t(q)), lo = F(t(j), t(q));
        if (hi > lo + slack) p6.add(two_point(t(k), t(q), hi, t(j), t(q), lo));
      }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < l; ++j) {
        const double up = F(t(k), t(l)), down = F(t(k), t(j));
        if (down > up + slack) p7.add(two_point(t(k), t(j), down, t(k), t(l), up));
      }
  for (std::size_t l = 0; l < n; ++l)
    if (const double v = F(1.0, t(l)); std::abs(v) > tol) p8.add(one_point(1.0, t(l), v));
  if (const double v = F(0.0, 1.0); std::abs(v - 1.0) > tol) p9.add(one_point(0.0, 1.0, v));

  for (const auto& [a, b] : probes.points) {
    const double v = F(a, b), w = F(b, a);
    if (v < -slack || v > 1.0 + slack) p1.add(one_point(a, b, v));
    if (v + w > 1.0 + slack) p2.add(two_point(a, b, v, b, a, w));
  }
  for (const auto& [hi, lo, c] : probes.pairs) {
    if (hi == lo) continue;
    if (const double v = F(hi, lo), w = F(lo, hi); v > w + slack) p5.add(two_point(hi, lo, v, lo, hi, w));
    if (const double v = F(hi, c), w = F(lo, c); v > w + slack) p6.add(two_point(hi, c, v, lo, c, w));
    if (const double up = F(c, hi), down = F(c, lo); down > up + slack) p7.add(two_point(c, lo, down, c, hi, up));
  }
  return assemble(opt, s);
}

PropertyReport check_properties(const DemandFunction& f, const PropertyCheckOptions& opt) {
  validate(opt);
  const std::size_t n = opt.grid_resolution;
  const double tol = opt.equality_tol, slack = opt.monotone_slack;
  const std::size_t limit = opt.max_witnesses;
  const auto t = [n](std::size_t k) { return grid_point(k, n); };
  const RandomProbes probes = draw_probes(opt);

  // Tabulate f once; every grid property is a comparison over this table.
  std::vector<double> table(n * n);
  const auto nn = static_cast<std::ptrdiff_t>(n * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < nn; ++idx) {
    const auto k = static_cast<std::size_t>(idx) / n, l = static_cast<std::size_t>(idx) % n;
    table[static_cast<std::size_t>(idx)] = f.eval_unchecked(t(k), t(l));
  }
  const auto F = [&](std::size_t k, std::size_t l) { return table[k * n + l]; };

  std::array<Sink, kPropertyCount> s;
  s[0] = scan_rows(n, limit, true, [&](std::size_t k, Sink& out) {
    for (std::size_t l = 0; l < n; ++l)
      if (const double v = F(k, l); v < -slack || v > 1.0 + slack) out.add(one_point(t(k), t(l), v));
  });
  s[1] = scan_rows(n, limit, true, [&](std::size_t k, Sink& out) {
    for (std::size_t l = 0; l < n; ++l)
      if (const double v = F(k, l), w = F(l, k); v + w > 1.0 + slack)
        out.add(two_point(t(k), t(l), v, t(l), t(k), w));
  });
  s[2] = Sink{limit, 0, {}};
  if (const double v = f.eval_unchecked(0.0, 0.0); std::abs(v - 0.5) > tol) s[2].add(one_point(0.0, 0.0, v));
  for (std::size_t k = 0; k < n; ++k)
    if (const double v = F(k, k), w = F(k, k); std::abs(v - w) > tol) s[2].add(two_point(t(k), t(k), v, t(k), t(k), w));
  s[3] = scan_rows(n, limit, true, [&](std::size_t k, Sink& out) {
    for (std::size_t l = k + 1; l < n; ++l)
      if (const double lo = F(k, k), hi = F(l, l); hi > lo + slack)
        out.add(two_point(t(k), t(k), lo, t(l), t(l), hi));
  });
  s[4] = scan_rows(n, limit, true, [&](std::size_t k, Sink& out) {
    for (std::size_t l = 0; l < k; ++l)
      if (const double v = F(k, l), w = F(l, k); v > w + slack) out.add(two_point(t(k), t(l), v, t(l), t(k), w));
  });
  s[5] = scan_rows(n, limit, true, [&](std::size_t q, Sink& out) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < k; ++j)
        if (const double hi = F(k, q), lo = F(j, q); hi > lo + slack)
          out.add(two_point(t(k), t(q), hi, t(j), t(q), lo));
  });
  s[6] = scan_rows(n, limit, true, [&](std::size_t k, Sink& out) {
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < l; ++j)
        if (const double up = F(k, l), down = F(k, j); down > up + slack)
          out.add(two_point(t(k), t(j), down, t(k), t(l), up));
  });
  s[7] = Sink{limit, 0, {}};
  for (std::size_t l = 0; l < n; ++l)
    if (const double v = F(n - 1, l); std::abs(v) > tol) s[7].add(one_point(1.0, t(l), v));
  s[8] = Sink{limit, 0, {}};
  if (const double v = F(0, n - 1); std::abs(v - 1.0) > tol) s[8].add(one_point(0.0, 1.0, v));

  // Random probes: cheap, evaluated serially in draw order.
  for (const auto& [a, b] : probes.points) {
    const double v = f.eval_unchecked(a, b), w = f.eval_unchecked(b, a);
    if (v < -slack || v > 1.0 + slack) s[0].add(one_point(a, b, v));
    if (v + w > 1.0 + slack) s[1].add(two_point(a, b, v, b, a, w));
  }
  for (const auto& [hi, lo, c] : probes.pairs) {
    if (hi == lo) continue;
    if (const double v = f.eval_unchecked(hi, lo), w = f.eval_unchecked(lo, hi); v > w + slack)
      s[4].add(two_point(hi, lo, v, lo, hi, w));
    if (const double v = f.eval_unchecked(hi, c), w = f.eval_unchecked(lo, c); v > w + slack)
      s[5].add(two_point(hi, c, v, lo, c, w));
    if (const double up = f.eval_unchecked(c, hi), down = f.eval_unchecked(c, lo); down > up + slack)
      s[6].add(two_point(c, lo, down, c, hi, up));
  }
  return assemble(opt, s);
}

PropertyReport check_properties(const DemandFunction& f, std::size_t grid_resolution) {
  PropertyCheckOptions opt;
  opt.grid_resolution = grid_resolution;
  return check_properties(f, opt);
}

}  // namespace fleetgame
