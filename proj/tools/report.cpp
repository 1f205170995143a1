#include "report.hpp"

#include <fmt/format.h>

namespace fleetgame::cli {

std::string format_vector(const NodeVector& v, int decimals) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += fmt::format("{}{:.{}f}", k ? ", " : "", v[k], decimals);
  return out + "]";
}

std::string format_matrix(const ArcMatrix& m, int decimals) {
  std::string out = "[";
  const auto rows = m.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) out += (i ? ", " : "") + format_vector(rows[i], decimals);
  return out + "]";
}

std::string summary_table(const RunMetrics& m, const EquilibriumResult& r) {
  std::string out = fmt::format("{} ({}, {})\n", m.name, to_string(m.mode),
                                m.converged ? fmt::format("converged in {} iterations", m.iterations)
                                            : fmt::format("NOT converged after {} iterations", m.iterations));
  out += fmt::format("  demand          {}\n", format_matrix(m.demand, 1));
  for (Player p : {Player::A, Player::B}) {
    const PlayerMetrics& pm = m.player(p);
    const bool frozen = (m.mode == Mode::MonopolyA && p == Player::B) || (m.mode == Mode::MonopolyB && p == Player::A);
    out += fmt::format("Player {}{}  fleet {:.1f}  profit {:.2f}\n", to_string(p),
                       frozen ? " [frozen: prices fixed at 1]" : "", pm.fleet, pm.profit);
    out += fmt::format("  supply          {}\n", format_vector(pm.supply, 1));
    out += fmt::format("  prices          {}\n", format_matrix(pm.prices, 4));
    out += fmt::format("  rides           {}\n", format_matrix(pm.rides, 1));
    out += fmt::format("  rebalancing     {}\n", format_matrix(pm.rebalancing, 1));
    out += fmt::format("  idle            {}\n", format_vector(pm.idle, 1));
    if (!pm.exit_arcs.empty()) {
      out += "  exits          ";
      for (const auto& a : pm.exit_arcs) out += fmt::format(" e{}{}", a.i + 1, a.j + 1);
      out += "\n";
    }
  }
  out += fmt::format("Market served {:.1f} of {:.1f}; total rebalancing {:.1f}\n", m.total_market_served,
                     m.total_demand, m.total_rebalancing);
  if (r.verification)
    out += fmt::format("Deviation check: gain A {:.3g}, gain B {:.3g} ({})\n", r.verification->gain_a,
                       r.verification->gain_b, r.verification->certified ? "certified" : "NOT certified");
  for (const auto& w : r.warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

std::string property_table(const PropertyReport& report) {
  std::string out = fmt::format("Grid {0}x{0} plus {1} random points\n", report.grid_resolution,
                                report.random_samples);
  for (const PropertyResult& r : report.results) {
    out += fmt::format("  P{}  {:<4}  {:<60}", static_cast<int>(r.property), r.pass ? "pass" : "FAIL",
                       describe(r.property));
    if (!r.pass) {
      out += fmt::format("  {} violation(s)", r.violations);
      if (!r.witnesses.empty()) {
        const PropertyWitness& w = r.witnesses.front();
        out += fmt::format(", e.g. f({:.3g}, {:.3g}) = {:.6g}", w.p_own, w.p_other, w.value);
        if (w.p_own2) out += fmt::format(" vs f({:.3g}, {:.3g}) = {:.6g}", *w.p_own2, *w.p_other2, *w.value2);
      }
    }
    out += "\n";
  }
  return out;
}

std::string potential_verdict(const PotentialDecision& d) {
  if (d.admissible) return fmt::format("potential: admissible C={}", *d.slope);
  std::string out = fmt::format("potential: inadmissible ({})", d.reason);
  if (d.witness)
    out += fmt::format("; cross-partial gap {:.6g} at (p_A, p_B) = ({}, {})", d.witness->gap, d.witness->p_a,
                       d.witness->p_b);
  return out;
}

}  // namespace fleetgame::cli
