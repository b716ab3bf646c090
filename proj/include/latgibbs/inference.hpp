#pragma once

#include <cstdint>

#include "latgibbs/geometry.hpp"
#include "latgibbs/rng.hpp"
#include "latgibbs/spin_system.hpp"

namespace latgibbs {

/// State-space limits for the exact-inference engines.
struct InferenceCaps {
  /// Maximum number of assignments marginal_brute may enumerate.
  std::int64_t enum_states = std::int64_t{1} << 26;
  /// Maximum number of per-row frontier states in the transfer sweep.
  std::int64_t transfer_row_states = std::int64_t{1} << 16;
  /// Maximum size of the (query assignments) x (frontier) table.
  std::int64_t joint_cells = std::int64_t{1} << 24;
};

/// Exact conditional inference on a finite free region with a fixed context.
/// Vertices assigned by `context` are conditioned on; lattice neighbours that
/// are neither free nor in the context contribute no edge factor. `query`
/// must be a subset of `free`.
struct InferenceProblem {
  const SpinSystem* system = nullptr;
  Region free;
  PartialConfiguration context;
  Region query;
};

/// Log conditional partition function by enumeration over all q^|free|
/// assignments; -inf iff no feasible assignment exists.
double log_partition_brute(const InferenceProblem& problem,
                           const InferenceCaps& caps = {});

/// Exact joint distribution of the query region by brute-force enumeration.
JointDistribution marginal_brute(const InferenceProblem& problem,
                                 const InferenceCaps& caps = {});

/// Exact joint distribution of the query region by a row-by-row transfer
/// sweep over the bounding rectangle of the free region. Agrees with
/// marginal_brute wherever both run.
JointDistribution marginal_transfer(const InferenceProblem& problem,
                                    const InferenceCaps& caps = {});

/// Exact sample of the conditional Gibbs distribution on the free region,
/// drawn by chain-rule sequential sampling in canonical vertex order. The
/// problem's query field is ignored.
PartialConfiguration sample_exact(const InferenceProblem& problem,
                                  SplitStream& rng,
                                  const InferenceCaps& caps = {});

}  // namespace latgibbs
