#pragma once

#include <cstdint>
#include <vector>

#include "latgibbs/geometry.hpp"

namespace latgibbs {

struct TraceNode {
  Vertex v;
  bool decided = false;  // true when the first draw settled the spin
  int spin = -1;
  std::int32_t parent = -1;
  std::int32_t depth = 1;  // root has depth 1
  std::vector<std::int32_t> children;
};

/// The tree of recursive calls grown by one top-level sampling call.
struct RecursionTrace {
  std::vector<TraceNode> nodes;

  std::int64_t total_calls() const {
    return static_cast<std::int64_t>(nodes.size());
  }
  int max_depth() const {
    int d = 0;
    for (const TraceNode& n : nodes) d = std::max(d, int{n.depth});
    return d;
  }
  std::int64_t indecision_count() const {
    std::int64_t c = 0;
    for (const TraceNode& n : nodes)
      if (!n.decided) ++c;
    return c;
  }
};

}  // namespace latgibbs
