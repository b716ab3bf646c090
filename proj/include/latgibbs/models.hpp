#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "latgibbs/inference.hpp"
#include "latgibbs/spin_system.hpp"
#include "latgibbs/trace.hpp"

namespace latgibbs {

/// Ferromagnetic q-state Potts system: unit fields, e^beta diagonal
/// couplings, unit off-diagonal couplings. Requires beta >= 0.
SpinSystem potts(int q, double beta);

/// Ising system with consistent external field h > 0 on the second spin:
/// b = (1, h), couplings e^beta diagonal / 1 off-diagonal. Requires beta >= 0.
SpinSystem ising(double beta, double h);

/// Half the L1 distance between two probability vectors of equal length.
double tv_distance(std::span<const double> d1, std::span<const double> d2);

/// Exact boundary-influence decay measurements at increasing scales.
struct DecayTable {
  struct Row {
    int ell;
    double tv;
  };
  std::vector<Row> rows;
};

/// For each scale ell: the exact TV distance between the marginals of the
/// target cells (offsets from the centre of a (2*ell-1)^2 box) under the
/// all-first-spin and all-last-spin constant boundary rings.
DecayTable wsm_probe(const SpinSystem& system, const std::vector<int>& ells,
                     const InferenceCaps& caps = {},
                     const Region& target_offsets = Region{{Vertex{0, 0}}});

/// Centre-vertex P(spin 2) on a (2*box_half+1)^2 box under the all-spin-1
/// (lo) and all-spin-2 (hi) boundary rings. Requires a monotone-eligible
/// system, for which lo <= hi sandwiches the infinite-volume marginal.
std::pair<double, double> bracket_bounds(const SpinSystem& system, int box_half,
                                         const InferenceCaps& caps = {});

/// Aggregate recursion statistics over a collection of traces.
struct BranchingSummary {
  std::int64_t runs = 0;
  double mean_calls = 0.0;
  int max_depth = 0;
  /// Bucket k counts traces whose size lies in [2^k, 2^(k+1)).
  std::vector<std::int64_t> size_histogram;
  /// Fraction of all calls that fell into the indecision zone.
  double indecision_frequency = 0.0;
};

BranchingSummary branching_stats(std::span<const RecursionTrace> traces);

/// Pearson goodness-of-fit statistic of counts against an expected
/// distribution (every expected entry must be positive).
double chi_square_gof(std::span<const std::int64_t> counts,
                      std::span<const double> expected);

}  // namespace latgibbs
