// Exact inference engines: brute-force enumeration and the transfer sweep.
//
// Both charge the same factor set: field factors for free cells only, and an
// interaction factor for every lattice edge with at least one free endpoint
// whose endpoints are both assigned. Context-context edges are constants of
// the conditioning and are never charged, so conditional distributions match
// the weight convention of log_weight exactly.

#include "latgibbs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latgibbs/errors.hpp"

namespace latgibbs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp accumulator with compensated summation;
// deterministic for a fixed add order.
struct LseAcc {
  double m = kNegInf;
  double s = 0.0;
  double c = 0.0;  // Kahan compensation for s
  void add(double lw) {
    if (lw == kNegInf) return;
    if (lw <= m) {
      kahan_add(std::exp(lw - m));
    } else {
      const double factor = m == kNegInf ? 0.0 : std::exp(m - lw);
      s *= factor;
      c *= factor;
      m = lw;
      kahan_add(1.0);
    }
  }
  double value() const { return s > 0.0 ? m + std::log(s) : kNegInf; }

 private:
  void kahan_add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

void validate_problem(const InferenceProblem& p) {
  if (p.system == nullptr) throw std::invalid_argument("problem has no system");
  for (const Vertex& v : p.query)
    if (!p.free.contains(v))
      throw std::invalid_argument("query region must be a subset of free");
  for (const Vertex& v : p.free)
    if (p.context.contains(v))
      throw std::invalid_argument("context and free regions overlap");
}

std::int64_t checked_pow(std::int64_t base, std::size_t exp,
                         std::int64_t limit) {
  std::int64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

// Precomputed factor lists over the free cells for fast re-evaluation.
struct BruteLayout {
  std::vector<Vertex> cells;                      // canonical order
  std::vector<std::pair<int, int>> free_edges;    // (cell, cell), a < b
  std::vector<std::pair<int, int>> context_edges; // (cell, context spin)
};

BruteLayout build_brute_layout(const InferenceProblem& p) {
  BruteLayout lay;
  lay.cells.assign(p.free.begin(), p.free.end());
  constexpr std::int32_t dx[4] = {1, -1, 0, 0};
  constexpr std::int32_t dy[4] = {0, 0, 1, -1};
  for (int i = 0; i < static_cast<int>(lay.cells.size()); ++i) {
    const Vertex v = lay.cells[i];
    for (int d = 0; d < 4; ++d) {
      Vertex n{v.x + dx[d], v.y + dy[d]};
      if (p.free.contains(n)) {
        if (v < n) {
          int j = static_cast<int>(
              std::lower_bound(lay.cells.begin(), lay.cells.end(), n) -
              lay.cells.begin());
          lay.free_edges.emplace_back(i, j);
        }
      } else if (auto c = p.context.get(n)) {
        lay.context_edges.emplace_back(i, *c);
      }
    }
  }
  return lay;
}

double assignment_log_weight(const SpinSystem& sys, const BruteLayout& lay,
                             const std::vector<int>& spins) {
  double lw = 0.0;
  for (std::size_t i = 0; i < spins.size(); ++i) lw += sys.log_field(spins[i]);
  for (const auto& [a, b] : lay.free_edges)
    lw += sys.log_coupling(spins[a], spins[b]);
  for (const auto& [a, c] : lay.context_edges)
    lw += sys.log_coupling(spins[a], c);
  return lw;
}

// Advances `spins` as a base-q odometer with the last cell fastest;
// returns false after the last assignment.
bool next_assignment(std::vector<int>& spins, int q) {
  for (int i = static_cast<int>(spins.size()) - 1; i >= 0; --i) {
    if (++spins[i] < q) return true;
    spins[i] = 0;
  }
  return false;
}

}  // namespace

double log_partition_brute(const InferenceProblem& problem,
                           const InferenceCaps& caps) {
  validate_problem(problem);
  const SpinSystem& sys = *problem.system;
  if (problem.free.empty()) return 0.0;
  if (checked_pow(sys.q(), problem.free.size(), caps.enum_states) >
      caps.enum_states)
    throw CapExceeded("brute-force enumeration exceeds the state cap");
  BruteLayout lay = build_brute_layout(problem);
  std::vector<int> spins(lay.cells.size(), 0);
  LseAcc acc;
  do {
    acc.add(assignment_log_weight(sys, lay, spins));
  } while (next_assignment(spins, sys.q()));
  return acc.value();
}

JointDistribution marginal_brute(const InferenceProblem& problem,
                                 const InferenceCaps& caps) {
  validate_problem(problem);
  const SpinSystem& sys = *problem.system;
  const int q = sys.q();
  if (problem.free.empty()) return {{}, {1.0}};
  if (checked_pow(q, problem.free.size(), caps.enum_states) > caps.enum_states)
    throw CapExceeded("brute-force enumeration exceeds the state cap");

  BruteLayout lay = build_brute_layout(problem);
  std::vector<Vertex> qvars(problem.query.begin(), problem.query.end());
  std::vector<int> qpos;  // positions of query cells within the free list
  qpos.reserve(qvars.size());
  for (const Vertex& v : qvars)
    qpos.push_back(static_cast<int>(
        std::lower_bound(lay.cells.begin(), lay.cells.end(), v) -
        lay.cells.begin()));
  const std::int64_t ncells = checked_pow(q, qvars.size(), caps.enum_states);
  if (ncells > caps.enum_states)
    throw CapExceeded("query assignment table exceeds the state cap");

  std::vector<LseAcc> acc(static_cast<std::size_t>(ncells));
  std::vector<int> spins(lay.cells.size(), 0);
  do {
    std::int64_t idx = 0;
    for (int pos : qpos) idx = idx * q + spins[pos];
    acc[static_cast<std::size_t>(idx)].add(
        assignment_log_weight(sys, lay, spins));
  } while (next_assignment(spins, q));

  LseAcc total;
  for (const LseAcc& a : acc) total.add(a.value());
  const double log_z = total.value();
  if (log_z == kNegInf)
    throw InfeasibleError("context admits no feasible assignment");
  JointDistribution out;
  out.vars = std::move(qvars);
  out.probs.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double lv = acc[i].value();
    out.probs[i] = lv == kNegInf ? 0.0 : std::exp(lv - log_z);
  }
  return out;
}

namespace {

// One cell of the sweep rectangle.
struct SweepCell {
  int domain = 1;     // q for free cells, 1 otherwise
  int fixed = -1;     // context spin; -1 for absent, -2 for free
  bool charged = false;
  bool query = false;
  std::vector<double> unary_log;  // free cells: log b + outside-context edges
};

struct SweepRow {
  std::vector<SweepCell> cells;
  std::int64_t states = 1;
  std::int64_t query_radix = 1;
  std::vector<std::int16_t> spin_at;  // states x width; -1 for absent
  std::vector<std::int64_t> qdigit;   // per state
  std::vector<double> fac_log;        // per state
};

int cell_spin(const SweepRow& row, std::int64_t state, int col) {
  return row.spin_at[static_cast<std::size_t>(state) * row.cells.size() + col];
}

}  // namespace

JointDistribution marginal_transfer(const InferenceProblem& problem,
                                    const InferenceCaps& caps) {
  validate_problem(problem);
  const SpinSystem& sys = *problem.system;
  const int q = sys.q();
  if (problem.free.empty()) return {{}, {1.0}};

  std::int32_t x0 = problem.free.begin()->x, x1 = x0;
  std::int32_t y0 = problem.free.begin()->y, y1 = y0;
  for (const Vertex& v : problem.free) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  const int width = x1 - x0 + 1;
  const int nrows = y1 - y0 + 1;

  constexpr std::int32_t dx[4] = {1, -1, 0, 0};
  constexpr std::int32_t dy[4] = {0, 0, 1, -1};

  std::vector<SweepRow> rows(static_cast<std::size_t>(nrows));
  for (int r = 0; r < nrows; ++r) {
    SweepRow& row = rows[r];
    row.cells.resize(static_cast<std::size_t>(width));
    const std::int32_t y = y0 + r;
    for (int c = 0; c < width; ++c) {
      const Vertex v{x0 + c, y};
      SweepCell& cell = row.cells[c];
      if (problem.free.contains(v)) {
        cell.domain = q;
        cell.fixed = -2;
        cell.charged = true;
        cell.query = problem.query.contains(v);
        cell.unary_log.resize(static_cast<std::size_t>(q));
        for (int s = 0; s < q; ++s) {
          double u = sys.log_field(s);
          for (int d = 0; d < 4; ++d) {
            Vertex n{v.x + dx[d], v.y + dy[d]};
            if (n.x < x0 || n.x > x1 || n.y < y0 || n.y > y1)
              if (auto cs = problem.context.get(n))
                u += sys.log_coupling(s, *cs);
          }
          cell.unary_log[s] = u;
        }
      } else if (auto cs = problem.context.get(v)) {
        cell.fixed = *cs;
      }
      row.states *= cell.domain;
      if (cell.query) row.query_radix *= q;
      if (row.states > caps.transfer_row_states)
        throw CapExceeded("transfer frontier exceeds the row-state cap");
    }

    // Decode tables and per-state row factors. States are mixed-radix over
    // the row's cells with the rightmost cell fastest.
    row.spin_at.resize(static_cast<std::size_t>(row.states) * width);
    row.qdigit.resize(static_cast<std::size_t>(row.states));
    row.fac_log.resize(static_cast<std::size_t>(row.states));
    for (std::int64_t s = 0; s < row.states; ++s) {
      std::int64_t rem = s;
      for (int c = width - 1; c >= 0; --c) {
        const SweepCell& cell = row.cells[c];
        int spin;
        if (cell.fixed == -2) {
          spin = static_cast<int>(rem % cell.domain);
          rem /= cell.domain;
        } else {
          spin = cell.fixed;
        }
        row.spin_at[static_cast<std::size_t>(s) * width + c] =
            static_cast<std::int16_t>(spin);
      }
      std::int64_t qd = 0;
      double lf = 0.0;
      for (int c = 0; c < width; ++c) {
        const SweepCell& cell = row.cells[c];
        const int spin = cell_spin(row, s, c);
        if (cell.charged) lf += cell.unary_log[spin];
        if (cell.query) qd = qd * q + spin;
        if (c + 1 < width) {
          const SweepCell& right = row.cells[c + 1];
          const int rs = cell_spin(row, s, c + 1);
          if (spin >= 0 && rs >= 0 && (cell.charged || right.charged))
            lf += sys.log_coupling(spin, rs);
        }
      }
      row.qdigit[s] = qd;
      row.fac_log[s] = lf;
    }
  }

  // Forward sweep. M is indexed [query_idx * row_states + state]; query
  // digits of a row migrate into the query index when advancing past it.
  auto row_lin_factors = [](const SweepRow& row, std::vector<double>& lin,
                            double& log_scale) {
    double mx = kNegInf;
    for (double lf : row.fac_log) mx = std::max(mx, lf);
    if (mx == kNegInf)
      throw InfeasibleError("context admits no feasible assignment");
    lin.resize(row.fac_log.size());
    for (std::size_t i = 0; i < row.fac_log.size(); ++i)
      lin[i] = std::exp(row.fac_log[i] - mx);
    log_scale += mx;
  };

  double log_scale = 0.0;
  std::vector<double> m;
  std::int64_t q_size = 1;
  {
    std::vector<double> lin;
    row_lin_factors(rows[0], lin, log_scale);
    m = std::move(lin);
  }

  std::vector<double> out;
  for (int r = 1; r < nrows; ++r) {
    const SweepRow& prev = rows[r - 1];
    const SweepRow& next = rows[r];
    const std::int64_t q_new = q_size * prev.query_radix;
    if (q_new * next.states > caps.joint_cells)
      throw CapExceeded("query-tracking table exceeds the joint-cell cap");

    std::vector<double> lin;
    row_lin_factors(next, lin, log_scale);

    std::vector<int> vert_cols;
    for (int c = 0; c < width; ++c) {
      const SweepCell& a = prev.cells[c];
      const SweepCell& b = next.cells[c];
      if (a.fixed != -1 && b.fixed != -1 && (a.charged || b.charged))
        vert_cols.push_back(c);
    }

    out.assign(static_cast<std::size_t>(q_new * next.states), 0.0);
    for (std::int64_t s = 0; s < prev.states; ++s) {
      const std::int64_t qd = prev.qdigit[s];
      bool any = false;
      for (std::int64_t qi = 0; qi < q_size && !any; ++qi)
        any = m[static_cast<std::size_t>(qi * prev.states + s)] != 0.0;
      if (!any) continue;
      for (std::int64_t t = 0; t < next.states; ++t) {
        double f = lin[static_cast<std::size_t>(t)];
        if (f == 0.0) continue;
        for (int c : vert_cols)
          f *= sys.coupling(cell_spin(prev, s, c), cell_spin(next, t, c));
        if (f == 0.0) continue;
        for (std::int64_t qi = 0; qi < q_size; ++qi) {
          const double src = m[static_cast<std::size_t>(qi * prev.states + s)];
          if (src != 0.0)
            out[static_cast<std::size_t>(
                (qi * prev.query_radix + qd) * next.states + t)] += src * f;
        }
      }
    }
    m.swap(out);
    q_size = q_new;

    double mx = 0.0;
    for (double v : m) mx = std::max(mx, v);
    if (mx == 0.0)
      throw InfeasibleError("context admits no feasible assignment");
    for (double& v : m) v /= mx;
    log_scale += std::log(mx);
  }

  // Fold the last row's query digits and sum out its remaining freedom.
  const SweepRow& last = rows[nrows - 1];
  const std::int64_t q_final = q_size * last.query_radix;
  std::vector<double> joint(static_cast<std::size_t>(q_final), 0.0);
  for (std::int64_t qi = 0; qi < q_size; ++qi)
    for (std::int64_t s = 0; s < last.states; ++s)
      joint[static_cast<std::size_t>(qi * last.query_radix + last.qdigit[s])] +=
          m[static_cast<std::size_t>(qi * last.states + s)];

  double total = 0.0;
  for (double v : joint) total += v;
  if (!(total > 0.0))
    throw InfeasibleError("context admits no feasible assignment");

  JointDistribution result;
  result.vars.assign(problem.query.begin(), problem.query.end());
  result.probs.resize(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i)
    result.probs[i] = joint[i] / total;
  return result;
}

PartialConfiguration sample_exact(const InferenceProblem& problem,
                                  SplitStream& rng, const InferenceCaps& caps) {
  validate_problem(problem);
  PartialConfiguration sampled;
  std::vector<Vertex> remaining(problem.free.begin(), problem.free.end());
  PartialConfiguration ctx = problem.context;
  for (const Vertex& v : problem.free) {
    InferenceProblem step;
    step.system = problem.system;
    step.free = Region(remaining);
    step.context = ctx;
    step.query = Region{{v}};
    JointDistribution d = marginal_transfer(step, caps);
    const double y = rng.uniform01();
    double cum = 0.0;
    int spin = -1, last_positive = -1;
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
      if (d.probs[i] > 0.0) last_positive = static_cast<int>(i);
      cum += d.probs[i];
      if (y < cum) {
        spin = static_cast<int>(i);
        break;
      }
    }
    if (spin < 0) {
      if (last_positive < 0 || y > cum + 1e-12)
        throw std::logic_error("conditional distribution mass lookup failed");
      spin = last_positive;
    }
    sampled.set(v, spin);
    ctx.set(v, spin);
    remaining.erase(std::find(remaining.begin(), remaining.end(), v));
  }
  return sampled;
}

}  // namespace latgibbs
