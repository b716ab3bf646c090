// Lazy depth-first sampling on the L-mesh.
//
// A call on mesh vertex v first computes per-spin lower bounds p_v that hold
// uniformly over every feasible filling of the unknown frame vertices. A
// single uniform draw then either settles the spin at v immediately or falls
// into the indecision zone, in which case the frame is resolved recursively
// and the same draw picks the spin from the residual intervals. The sampled
// law does not depend on the tightness of the bounds, only on their validity.

#include "latgibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "latgibbs/errors.hpp"

namespace latgibbs {

Strategy parse_strategy(const std::string& name) {
  if (name == "exact-min") return Strategy::exact_min;
  if (name == "monotone") return Strategy::monotone_extremes;
  if (name == "trivial") return Strategy::trivial;
  throw ConfigError("unknown strategy '" + name +
                    "' (expected exact-min, monotone, or trivial)");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::exact_min: return "exact-min";
    case Strategy::monotone_extremes: return "monotone";
    case Strategy::trivial: return "trivial";
  }
  return "?";
}

std::vector<Vertex> frame_order(const Frame& frame,
                                const PartialConfiguration& known) {
  std::vector<Vertex> out;
  out.reserve(frame.vertices.size());
  for (const Vertex& w : frame.vertices)
    if (!known.contains(w)) out.push_back(w);
  return out;
}

Sampler::Sampler(const SpinSystem& system, SamplerConfig config)
    : system_(system), config_(config) {
  if (config_.mesh_l < 1) throw ConfigError("mesh parameter must be >= 1");
  if (config_.budget < 1) throw ConfigError("budget must be positive");
  if (config_.strategy == Strategy::monotone_extremes &&
      !system_.monotone_eligible())
    throw ConfigError(
        "strategy 'monotone' requires a monotone-eligible (q=2 ferromagnetic) "
        "system");
}

namespace {

// Known spins restricted to the closed 2L-square of the frame.
PartialConfiguration square_restriction(const PartialConfiguration& known,
                                        const Frame& frame) {
  const int side = 2 * frame.mesh_l;
  PartialConfiguration out;
  for (std::int32_t dy = 0; dy <= side; ++dy)
    for (std::int32_t dx = 0; dx <= side; ++dx) {
      Vertex u{frame.anchor.x + dx, frame.anchor.y + dy};
      if (auto s = known.get(u)) out.set(u, *s);
    }
  return out;
}

std::vector<std::int32_t> cache_key(const Vertex& v, const Frame& frame,
                                    const PartialConfiguration& square_known) {
  std::vector<std::int32_t> key;
  key.reserve(2 + 3 * square_known.size());
  key.push_back(v.x - frame.anchor.x);
  key.push_back(v.y - frame.anchor.y);
  for (const auto& [u, s] : square_known) {
    key.push_back(u.x - frame.anchor.x);
    key.push_back(u.y - frame.anchor.y);
    key.push_back(s);
  }
  return key;
}

std::int64_t int_pow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

PVector Sampler::lower_bounds(const Vertex& v,
                              const PartialConfiguration& known) const {
  if (!on_mesh(v, config_.mesh_l))
    throw std::invalid_argument("lower_bounds: vertex is not on the mesh");
  if (known.contains(v))
    throw std::invalid_argument("lower_bounds: vertex already assigned");
  if (config_.strategy == Strategy::trivial) {
    PVector p;
    p.lower.assign(static_cast<std::size_t>(system_.q()), 0.0);
    p.indecision = 1.0;
    return p;
  }
  const Frame frame = frame_of(v, config_.mesh_l);
  PartialConfiguration square_known = square_restriction(known, frame);
  if (!config_.memoize) return compute_lower_bounds(v, square_known);
  auto key = cache_key(v, frame, square_known);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  PVector p = compute_lower_bounds(v, square_known);
  cache_.emplace(std::move(key), p);
  return p;
}

PVector Sampler::compute_lower_bounds(
    const Vertex& v, const PartialConfiguration& square_known) const {
  PVector p = config_.strategy == Strategy::exact_min
                  ? exact_min_bounds(v, square_known)
                  : monotone_bounds(v, square_known);
  double sum = 0.0;
  for (double& x : p.lower) {
    x = std::clamp(x, 0.0, 1.0);
    sum += x;
  }
  if (sum > 1.0 + 1e-9)
    throw std::logic_error("lower bounds exceed total probability");
  p.indecision = std::max(0.0, 1.0 - sum);
  return p;
}

PVector Sampler::exact_min_bounds(
    const Vertex& v, const PartialConfiguration& square_known) const {
  const int q = system_.q();
  const Frame frame = frame_of(v, config_.mesh_l);
  const int side = 2 * config_.mesh_l;

  std::vector<Vertex> free_cells;
  for (std::int32_t dy = 1; dy < side; ++dy)
    for (std::int32_t dx = 1; dx < side; ++dx) {
      Vertex u{frame.anchor.x + dx, frame.anchor.y + dy};
      if (!square_known.contains(u)) free_cells.push_back(u);
    }
  std::vector<Vertex> unknown_frame;
  for (const Vertex& w : frame.vertices)
    if (!square_known.contains(w)) unknown_frame.push_back(w);
  free_cells.insert(free_cells.end(), unknown_frame.begin(),
                    unknown_frame.end());

  std::vector<Vertex> query_cells = unknown_frame;
  query_cells.push_back(v);

  InferenceProblem prob;
  prob.system = &system_;
  prob.free = Region(std::move(free_cells));
  prob.context = square_known;
  prob.query = Region(std::move(query_cells));
  JointDistribution joint = marginal_transfer(prob, config_.caps);

  // The joint treats frame cells as ordinary free cells; the extra factors
  // internal to a filling tau cancel in the conditional at v, and a filling
  // is feasible exactly when its slice carries mass.
  const int n = static_cast<int>(joint.vars.size());
  int v_pos = static_cast<int>(
      std::find(joint.vars.begin(), joint.vars.end(), v) - joint.vars.begin());
  const std::int64_t stride_v = int_pow(q, n - 1 - v_pos);
  const std::int64_t n_tau = static_cast<std::int64_t>(joint.probs.size()) / q;

  std::vector<double> denom(static_cast<std::size_t>(n_tau), 0.0);
  for (std::int64_t idx = 0;
       idx < static_cast<std::int64_t>(joint.probs.size()); ++idx) {
    const std::int64_t tau =
        (idx / (stride_v * q)) * stride_v + idx % stride_v;
    denom[static_cast<std::size_t>(tau)] += joint.probs[idx];
  }

  PVector p;
  p.lower.assign(static_cast<std::size_t>(q), 2.0);
  bool any_feasible = false;
  for (std::int64_t idx = 0;
       idx < static_cast<std::int64_t>(joint.probs.size()); ++idx) {
    const std::int64_t tau =
        (idx / (stride_v * q)) * stride_v + idx % stride_v;
    const double d = denom[static_cast<std::size_t>(tau)];
    if (d <= 0.0) continue;
    any_feasible = true;
    const int spin = static_cast<int>((idx / stride_v) % q);
    p.lower[spin] = std::min(p.lower[spin], joint.probs[idx] / d);
  }
  if (!any_feasible)
    throw InfeasibleError("no feasible frame filling: state is infeasible");
  for (double& x : p.lower)
    if (x > 1.0) x = 0.0;  // spin never feasible under any filling
  return p;
}

PVector Sampler::monotone_bounds(
    const Vertex& v, const PartialConfiguration& square_known) const {
  if (!system_.monotone_eligible())
    throw ConfigError("monotone strategy on a non-eligible system");
  const int q = system_.q();
  const Frame frame = frame_of(v, config_.mesh_l);
  const int side = 2 * config_.mesh_l;

  std::vector<Vertex> interior_free;
  for (std::int32_t dy = 1; dy < side; ++dy)
    for (std::int32_t dx = 1; dx < side; ++dx) {
      Vertex u{frame.anchor.x + dx, frame.anchor.y + dy};
      if (!square_known.contains(u)) interior_free.push_back(u);
    }
  std::vector<Vertex> unknown_frame;
  for (const Vertex& w : frame.vertices)
    if (!square_known.contains(w)) unknown_frame.push_back(w);

  PVector p;
  p.lower.assign(static_cast<std::size_t>(q), 2.0);
  bool any_feasible = false;
  for (int fill : {0, q - 1}) {
    PartialConfiguration ctx = square_known;
    for (const Vertex& w : unknown_frame) ctx.set(w, fill);
    InferenceProblem prob;
    prob.system = &system_;
    prob.free = Region(interior_free);
    prob.context = std::move(ctx);
    prob.query = Region{{v}};
    try {
      JointDistribution d = marginal_transfer(prob, config_.caps);
      any_feasible = true;
      for (int s = 0; s < q; ++s)
        p.lower[s] = std::min(p.lower[s], d.probs[s]);
    } catch (const InfeasibleError&) {
      // Skip an infeasible constant filling.
    }
  }
  if (!any_feasible)
    throw InfeasibleError("both constant frame fillings are infeasible");
  return p;
}

MarginalDistribution Sampler::region_conditional(
    const Vertex& v, const PartialConfiguration& known,
    const std::set<Vertex>& region, const std::set<Vertex>& boundary) const {
  PartialConfiguration ctx;
  std::vector<Vertex> free_cells;
  for (const Vertex& u : region) {
    if (auto s = known.get(u)) {
      ctx.set(u, *s);
    } else {
      free_cells.push_back(u);
    }
  }
  for (const Vertex& w : boundary) {
    if (auto s = known.get(w)) {
      ctx.set(w, *s);
    } else {
      throw std::logic_error("boundary incomplete in region_conditional");
    }
  }
  InferenceProblem prob;
  prob.system = &system_;
  prob.free = Region(std::move(free_cells));
  prob.context = std::move(ctx);
  prob.query = Region{{v}};
  JointDistribution d = marginal_transfer(prob, config_.caps);
  return MarginalDistribution{std::move(d.probs)};
}

void Sampler::lazy(RunState& state, const Vertex& v) const {
  if (!on_mesh(v, config_.mesh_l))
    throw std::invalid_argument("lazy: vertex is not on the mesh");
  if (state.known.contains(v))
    throw std::invalid_argument("lazy: vertex already assigned");
  if (std::find(state.pending.begin(), state.pending.end(), v) !=
          state.pending.end() ||
      state.locked.count(v) != 0)
    throw std::logic_error("lazy: vertex is reserved by an in-progress call");

  // Record the call in the trace forest.
  std::int32_t trace_idx, node_idx;
  TraceNode fresh;
  fresh.v = v;
  if (state.stack.empty()) {
    trace_idx = static_cast<std::int32_t>(state.traces.size());
    state.traces.emplace_back();
    node_idx = 0;
    state.traces.back().nodes.push_back(std::move(fresh));
  } else {
    auto [ti, pi] = state.stack.back();
    trace_idx = ti;
    RecursionTrace& t = state.traces[trace_idx];
    node_idx = static_cast<std::int32_t>(t.nodes.size());
    fresh.parent = pi;
    fresh.depth = t.nodes[pi].depth + 1;
    t.nodes.push_back(std::move(fresh));
    t.nodes[pi].children.push_back(node_idx);
  }

  ++state.calls_used;
  if (state.calls_used > config_.budget)
    throw BudgetExhausted(state.calls_used, config_.budget);

  const PVector p = lower_bounds(v, state.known);
  const double y = state.rng.uniform01();

  double cum = 0.0;
  for (int s = 0; s < system_.q(); ++s) {
    cum += p.lower[s];
    if (y < cum) {
      state.known.set(v, s);
      TraceNode& node = state.traces[trace_idx].nodes[node_idx];
      node.decided = true;
      node.spin = s;
      return;
    }
  }

  state.stack.emplace_back(trace_idx, node_idx);
  state.pending.push_back(v);
  bd_calc(state, v, p, y);
  state.pending.pop_back();
  state.stack.pop_back();
  TraceNode& node = state.traces[trace_idx].nodes[node_idx];
  node.decided = false;
  node.spin = state.known.at(v);
}

void Sampler::bd_calc(RunState& state, const Vertex& v, const PVector& p,
                      double y) const {
  const double base = p.sum_lower();
  if (y < base - 1e-12)
    throw std::invalid_argument("bd_calc: draw is not in the indecision zone");

  // The mesh geometry admits cycles in the frame dependencies: a frame can
  // contain a vertex whose own call is lower on the stack (at any L, each
  // crossing vertex and the midpoints of its frame edges lie on each other's
  // frames), and deeper calls can reach vertices strictly inside this square.
  // Sampling an in-progress vertex would break the interval accounting of its
  // pending call, and assigning a square-interior vertex mid-recursion would
  // push the residual conditional outside the family the lower bounds were
  // minimised over. Both are prevented: the interior's unknown mesh vertices
  // are locked for the duration of this call, and the conditioning set
  // detours around pending or locked vertices by absorbing them into the
  // marginalised region and adding their outside neighbours to the boundary.
  // Unassigned off-mesh vertices picked up by a detour are absorbed the same
  // way, so every unassigned boundary member is a samplable mesh vertex.
  const int l = config_.mesh_l;
  const Frame frame = frame_of(v, l);
  const int side = 2 * l;

  std::vector<Vertex> locked_here;
  std::set<Vertex> region;
  for (std::int32_t dy = 1; dy < side; ++dy)
    for (std::int32_t dx = 1; dx < side; ++dx) {
      const Vertex u{frame.anchor.x + dx, frame.anchor.y + dy};
      region.insert(u);
      if (u != v && on_mesh(u, l) && !state.known.contains(u)) {
        ++state.locked[u];
        locked_here.push_back(u);
      }
    }

  std::set<Vertex> boundary;
  std::vector<Vertex> to_check;
  for (const Vertex& w : frame.vertices) {
    boundary.insert(w);
    to_check.push_back(w);
  }
  constexpr std::int32_t dx4[4] = {1, -1, 0, 0};
  constexpr std::int32_t dy4[4] = {0, 0, 1, -1};
  const std::size_t region_cap = 4096;
  while (!to_check.empty()) {
    const Vertex b = to_check.back();
    to_check.pop_back();
    if (region.count(b) != 0) continue;
    if (state.known.contains(b)) continue;
    const bool blocked =
        std::find(state.pending.begin(), state.pending.end(), b) !=
            state.pending.end() ||
        state.locked.count(b) != 0;
    if (!blocked && on_mesh(b, l)) continue;
    region.insert(b);
    boundary.erase(b);
    if (region.size() > region_cap)
      throw CapExceeded("conditioning region grew past the supported size");
    for (int d = 0; d < 4; ++d) {
      Vertex nb{b.x + dx4[d], b.y + dy4[d]};
      if (region.count(nb) == 0 && boundary.insert(nb).second)
        to_check.push_back(nb);
    }
  }

  // Recursion order: the canonical frame traversal (minus detoured members),
  // then any detour additions in canonical order.
  std::vector<Vertex> order;
  for (const Vertex& w : frame.vertices)
    if (boundary.count(w) != 0) order.push_back(w);
  for (const Vertex& w : boundary)
    if (std::find(frame.vertices.begin(), frame.vertices.end(), w) ==
        frame.vertices.end())
      order.push_back(w);

  for (const Vertex& w : order) {
    // A deeper call may already have assigned w; its spin was then drawn from
    // the correct conditional, so the chain rule is unaffected by skipping.
    if (!state.known.contains(w)) lazy(state, w);
  }

  for (const Vertex& u : locked_here)
    if (--state.locked[u] == 0) state.locked.erase(u);

  const MarginalDistribution mu =
      region_conditional(v, state.known, region, boundary);
  const int q = system_.q();
  double hi = base;
  int last_positive = -1;
  int chosen = -1;
  for (int s = 0; s < q; ++s) {
    double rho = mu.probs[s] - p.lower[s];
    if (rho < -1e-12)
      throw std::logic_error(
          "negative residual: lower-bound strategy is invalid for this system");
    if (rho < 0.0) rho = 0.0;
    if (rho > 0.0) last_positive = s;
    hi += rho;
    if (y < hi) {
      chosen = s;
      break;
    }
  }
  if (chosen < 0) {
    if (last_positive < 0 || y > hi + 1e-12)
      throw std::logic_error("residual intervals fail to cover the draw");
    chosen = last_positive;
  }
  state.known.set(v, chosen);
}

PartialConfiguration Sampler::sample_window(RunState& state,
                                            const Region& window) const {
  const int l = config_.mesh_l;
  std::vector<Vertex> targets;
  std::vector<Vertex> anchors;
  for (const Vertex& v : window) {
    if (on_mesh(v, l)) {
      targets.push_back(v);
    } else {
      Vertex a{floor_div(v.x, l) * l, floor_div(v.y, l) * l};
      anchors.push_back(a);
    }
  }
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  std::vector<Cell> cells;
  cells.reserve(anchors.size());
  for (const Vertex& a : anchors) {
    cells.push_back(cell_of(Vertex{a.x + 1, a.y + 1}, l));
    for (const Vertex& w : cells.back().frame) targets.push_back(w);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  for (const Vertex& t : targets)
    if (!state.known.contains(t)) lazy(state, t);

  // Cell interiors are conditionally independent given their completed
  // frames; fill each one exactly.
  for (const Cell& cell : cells) {
    std::vector<Vertex> free_cells;
    for (const Vertex& u : cell.interior)
      if (!state.known.contains(u)) free_cells.push_back(u);
    InferenceProblem prob;
    prob.system = &system_;
    prob.free = Region(std::move(free_cells));
    prob.context = state.known.restricted(
        Region::rectangle(cell.anchor.x, cell.anchor.y, cell.anchor.x + l,
                          cell.anchor.y + l));
    PartialConfiguration fill = sample_exact(prob, state.rng, config_.caps);
    for (const auto& [u, s] : fill) state.known.set(u, s);
  }
  return state.known.restricted(window);
}

PartialConfiguration Sampler::sample_window(const Region& window,
                                            std::uint64_t seed) const {
  RunState state = make_state(seed);
  return sample_window(state, window);
}

}  // namespace latgibbs
