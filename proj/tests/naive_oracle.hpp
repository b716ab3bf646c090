#pragma once

// Test-side reference implementations, written independently of the library's
// inference code paths: plain linear-domain enumeration with all-pairs edge
// scans. Only suitable for tiny instances and moderate couplings.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "latgibbs/spin_system.hpp"

namespace naive {

inline int l1_dist(const latgibbs::Vertex& a, const latgibbs::Vertex& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline double assignment_weight(const latgibbs::SpinSystem& sys,
                                const std::vector<latgibbs::Vertex>& cells,
                                const std::vector<int>& spins,
                                const latgibbs::PartialConfiguration& ctx) {
  double w = 1.0;
  for (std::size_t i = 0; i < cells.size(); ++i) w *= sys.field(spins[i]);
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (l1_dist(cells[i], cells[j]) == 1)
        w *= sys.coupling(spins[i], spins[j]);
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (const auto& [cv, cs] : ctx)
      if (l1_dist(cells[i], cv) == 1) w *= sys.coupling(spins[i], cs);
  return w;
}

/// Unnormalised joint weights over assignments of `query` (indexed base-q,
/// first query cell most significant), summing out the other cells.
inline std::vector<double> raw_joint(const latgibbs::SpinSystem& sys,
                                     const std::vector<latgibbs::Vertex>& cells,
                                     const latgibbs::PartialConfiguration& ctx,
                                     const std::vector<latgibbs::Vertex>& query) {
  const int q = sys.q();
  std::size_t ncells = 1;
  for (std::size_t i = 0; i < query.size(); ++i) ncells *= q;
  std::vector<double> acc(ncells, 0.0);
  std::vector<int> spins(cells.size(), 0);
  std::vector<int> qpos;
  for (const auto& v : query)
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i] == v) qpos.push_back(static_cast<int>(i));
  while (true) {
    std::size_t idx = 0;
    for (int p : qpos) idx = idx * q + static_cast<std::size_t>(spins[p]);
    acc[idx] += assignment_weight(sys, cells, spins, ctx);
    int i = static_cast<int>(spins.size()) - 1;
    for (; i >= 0; --i) {
      if (++spins[i] < q) break;
      spins[i] = 0;
    }
    if (i < 0) break;
  }
  return acc;
}

inline std::vector<double> joint(const latgibbs::SpinSystem& sys,
                                 const std::vector<latgibbs::Vertex>& cells,
                                 const latgibbs::PartialConfiguration& ctx,
                                 const std::vector<latgibbs::Vertex>& query) {
  std::vector<double> acc = raw_joint(sys, cells, ctx, query);
  double total = 0.0;
  for (double v : acc) total += v;
  for (double& v : acc) v /= total;
  return acc;
}

}  // namespace naive
