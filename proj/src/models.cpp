#include "latgibbs/models.hpp"

#include <cmath>
#include <stdexcept>

#include "latgibbs/errors.hpp"

namespace latgibbs {

SpinSystem potts(int q, double beta) {
  if (q < 2) throw std::invalid_argument("potts: q must be >= 2");
  if (!(beta >= 0.0))
    throw std::invalid_argument("potts: beta must be >= 0 (ferromagnetic)");
  std::vector<double> b(static_cast<std::size_t>(q), 1.0);
  std::vector<std::vector<double>> a(
      static_cast<std::size_t>(q),
      std::vector<double>(static_cast<std::size_t>(q), 1.0));
  const double diag = std::exp(beta);
  for (int i = 0; i < q; ++i) a[i][i] = diag;
  return SpinSystem(q, std::move(b), std::move(a));
}

SpinSystem ising(double beta, double h) {
  if (!(beta >= 0.0))
    throw std::invalid_argument("ising: beta must be >= 0 (ferromagnetic)");
  if (!(h > 0.0)) throw std::invalid_argument("ising: field h must be > 0");
  const double diag = std::exp(beta);
  return SpinSystem(2, {1.0, h}, {{diag, 1.0}, {1.0, diag}});
}

double tv_distance(std::span<const double> d1, std::span<const double> d2) {
  if (d1.size() != d2.size())
    throw std::invalid_argument("tv_distance: dimension mismatch");
  double l1 = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) l1 += std::abs(d1[i] - d2[i]);
  return 0.5 * l1;
}

DecayTable wsm_probe(const SpinSystem& system, const std::vector<int>& ells,
                     const InferenceCaps& caps, const Region& target_offsets) {
  for (std::size_t i = 1; i < ells.size(); ++i)
    if (ells[i] <= ells[i - 1])
      throw std::invalid_argument("wsm_probe: scales must strictly increase");
  DecayTable table;
  for (int ell : ells) {
    if (ell < 1) throw std::invalid_argument("wsm_probe: scale must be >= 1");
    const int r = ell - 1;
    Region interior = Region::rectangle(-r, -r, r, r);
    Region ring = graph_boundary(interior);
    std::vector<Vertex> targets;
    for (const Vertex& off : target_offsets) targets.push_back(off);
    InferenceProblem prob;
    prob.system = &system;
    prob.free = interior;
    prob.query = Region(std::move(targets));
    prob.context = PartialConfiguration::constant(ring, 0);
    JointDistribution d1 = marginal_transfer(prob, caps);
    prob.context = PartialConfiguration::constant(ring, system.q() - 1);
    JointDistribution d2 = marginal_transfer(prob, caps);
    table.rows.push_back({ell, tv_distance(d1.probs, d2.probs)});
  }
  return table;
}

std::pair<double, double> bracket_bounds(const SpinSystem& system, int box_half,
                                         const InferenceCaps& caps) {
  if (!system.monotone_eligible())
    throw std::invalid_argument("bracket_bounds: system is not monotone");
  if (box_half < 1)
    throw std::invalid_argument("bracket_bounds: box_half must be >= 1");
  Region interior = Region::rectangle(-box_half, -box_half, box_half, box_half);
  Region ring = graph_boundary(interior);
  InferenceProblem prob;
  prob.system = &system;
  prob.free = interior;
  prob.query = Region{{Vertex{0, 0}}};
  prob.context = PartialConfiguration::constant(ring, 0);
  const double lo = marginal_transfer(prob, caps).probs[1];
  prob.context = PartialConfiguration::constant(ring, 1);
  const double hi = marginal_transfer(prob, caps).probs[1];
  if (lo > hi + 1e-12)
    throw std::logic_error("bracket_bounds: bounds out of order");
  return {lo, hi};
}

BranchingSummary branching_stats(std::span<const RecursionTrace> traces) {
  if (traces.empty())
    throw std::invalid_argument("branching_stats: empty trace collection");
  BranchingSummary s;
  s.runs = static_cast<std::int64_t>(traces.size());
  std::int64_t total = 0, indecisions = 0;
  for (const RecursionTrace& t : traces) {
    total += t.total_calls();
    indecisions += t.indecision_count();
    s.max_depth = std::max(s.max_depth, t.max_depth());
    int bucket = 0;
    while ((std::int64_t{1} << (bucket + 1)) <= t.total_calls()) ++bucket;
    if (static_cast<std::size_t>(bucket) >= s.size_histogram.size())
      s.size_histogram.resize(static_cast<std::size_t>(bucket) + 1, 0);
    ++s.size_histogram[static_cast<std::size_t>(bucket)];
  }
  s.mean_calls = static_cast<double>(total) / static_cast<double>(s.runs);
  s.indecision_frequency =
      total > 0 ? static_cast<double>(indecisions) / static_cast<double>(total)
                : 0.0;
  return s;
}

double chi_square_gof(std::span<const std::int64_t> counts,
                      std::span<const double> expected) {
  if (counts.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: dimension mismatch");
  std::int64_t n = 0;
  for (std::int64_t c : counts) n += c;
  if (n <= 0) throw std::invalid_argument("chi_square_gof: no observations");
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(expected[i] > 0.0))
      throw std::invalid_argument("chi_square_gof: zero expected cell");
    const double e = expected[i] * static_cast<double>(n);
    const double d = static_cast<double>(counts[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

}  // namespace latgibbs
