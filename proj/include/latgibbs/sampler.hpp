#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "latgibbs/geometry.hpp"
#include "latgibbs/inference.hpp"
#include "latgibbs/rng.hpp"
#include "latgibbs/spin_system.hpp"
#include "latgibbs/trace.hpp"

namespace latgibbs {

/// How the pre-recursion spin lower bounds p_v are computed. Any choice with
/// 0 <= p <= (the exact minimum over frame fillings) leaves the sampled law
/// unchanged; tighter bounds recurse less often.
enum class Strategy {
  exact_min,          // minimum over all feasible fillings of the unknown frame
  monotone_extremes,  // minimum over the two constant fillings (q = 2 ferro)
  trivial,            // all-zero bounds: every call recurses
};

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);

/// Spin lower bounds at a vertex plus the leftover indecision mass. The unit
/// interval is split into half-open spin intervals [cum_{i-1}, cum_i) in spin
/// order followed by the indecision interval [sum, 1].
struct PVector {
  std::vector<double> lower;
  double indecision = 1.0;

  double sum_lower() const {
    double s = 0.0;
    for (double p : lower) s += p;
    return s;
  }
};

struct SamplerConfig {
  int mesh_l = 2;
  Strategy strategy = Strategy::exact_min;
  std::int64_t budget = 10'000'000;  // max lazy calls per run state
  InferenceCaps caps;
  bool memoize = true;
};

/// The lazy depth-first sampler. One instance holds an immutable spin system,
/// a fixed mesh parameter and strategy, and a cache of lower-bound vectors
/// keyed by the translation-invariant local pattern of known spins. A single
/// run is strictly sequential; distinct seeds can run on separate instances
/// concurrently.
class Sampler {
 public:
  Sampler(const SpinSystem& system, SamplerConfig config);

  /// Mutable state threaded through one sampling run.
  struct RunState {
    PartialConfiguration known;
    std::vector<RecursionTrace> traces;  // one per top-level call
    std::int64_t calls_used = 0;
    SplitStream rng;

    explicit RunState(SplitStream stream) : rng(stream) {}

    // Recursion bookkeeping: (trace index, node index) of the active call,
    // the vertices whose calls are still in progress, and the square-interior
    // vertices those calls have locked against mid-recursion assignment.
    std::vector<std::pair<std::int32_t, std::int32_t>> stack;
    std::vector<Vertex> pending;
    std::map<Vertex, int> locked;
  };

  RunState make_state(std::uint64_t seed) const {
    return RunState(SplitStream(seed));
  }

  /// Lower bounds p_v for the configured strategy: entry i bounds the
  /// conditional marginal of spin i at v from below uniformly over all
  /// feasible fillings of the unknown frame vertices, given the known spins
  /// restricted to the closed 2L-square.
  PVector lower_bounds(const Vertex& v, const PartialConfiguration& known) const;

  /// One recursive sampling call: draws a single uniform, decides the spin at
  /// v immediately if the draw lands in a spin interval, and otherwise
  /// resolves it through bd_calc. Exactly one spin is appended at v.
  void lazy(RunState& state, const Vertex& v) const;

  /// Recursion subroutine: samples the unknown vertices of a separating mesh
  /// ring around v in canonical order (skipping any assigned by deeper
  /// recursion along the way), then settles the spin at v from the residual
  /// intervals using the same uniform draw y that landed in the indecision
  /// zone. The ring is normally the frame of v; when the frame contains a
  /// vertex whose own call is still in progress, the ring of the next larger
  /// mesh square is used instead (the in-progress vertex then sits inside the
  /// square and is marginalised by the residual conditional).
  void bd_calc(RunState& state, const Vertex& v, const PVector& p,
               double y) const;

  /// Perfect sample of the Gibbs marginal on a finite window: lazily samples
  /// every mesh vertex of the window and every frame of an L-cell whose
  /// interior meets the window, then fills those cell interiors exactly.
  PartialConfiguration sample_window(RunState& state,
                                     const Region& window) const;
  PartialConfiguration sample_window(const Region& window,
                                     std::uint64_t seed) const;

  const SpinSystem& system() const { return system_; }
  const SamplerConfig& config() const { return config_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  PVector compute_lower_bounds(const Vertex& v,
                               const PartialConfiguration& square_known) const;
  PVector exact_min_bounds(const Vertex& v,
                           const PartialConfiguration& square_known) const;
  PVector monotone_bounds(const Vertex& v,
                          const PartialConfiguration& square_known) const;
  MarginalDistribution region_conditional(const Vertex& v,
                                          const PartialConfiguration& known,
                                          const std::set<Vertex>& region,
                                          const std::set<Vertex>& boundary) const;

  const SpinSystem& system_;
  SamplerConfig config_;
  mutable std::map<std::vector<std::int32_t>, PVector> cache_;
};

/// The frame's canonical traversal with known vertices removed.
std::vector<Vertex> frame_order(const Frame& frame,
                                const PartialConfiguration& known);

}  // namespace latgibbs
