#pragma once

#include <map>
#include <optional>
#include <vector>

#include "latgibbs/geometry.hpp"

namespace latgibbs {

/// A q-spin system on the 2-D lattice: a field vector b over spins and a
/// symmetric nonnegative interaction matrix A over spin pairs. Spins are
/// 0-based indices internally; text interfaces print them 1-based.
///
/// Immutable after construction and freely shareable between threads.
class SpinSystem {
 public:
  SpinSystem(int q, std::vector<double> field,
             std::vector<std::vector<double>> interaction);

  int q() const { return q_; }
  double field(int s) const { return field_[s]; }
  double coupling(int s, int t) const { return coupling_[s * q_ + t]; }
  double log_field(int s) const { return log_field_[s]; }
  double log_coupling(int s, int t) const { return log_coupling_[s * q_ + t]; }

  /// Smallest row index whose interaction entries are all positive, if any.
  std::optional<int> soft_row() const { return soft_row_; }
  /// All interaction entries positive.
  bool strictly_positive() const { return strictly_positive_; }
  /// q = 2 with A(1,1)A(2,2) >= A(1,2)^2: the two-spin ferromagnets for which
  /// the constant-boundary extremes bound every conditional marginal.
  bool monotone_eligible() const { return monotone_eligible_; }

 private:
  int q_;
  std::vector<double> field_, log_field_;
  std::vector<double> coupling_, log_coupling_;  // q x q row-major
  std::optional<int> soft_row_;
  bool strictly_positive_ = false;
  bool monotone_eligible_ = false;
};

/// Finite vertex -> spin assignment. Iteration is in canonical order.
class PartialConfiguration {
 public:
  PartialConfiguration() = default;

  static PartialConfiguration constant(const Region& where, int spin);

  bool contains(const Vertex& v) const { return a_.count(v) != 0; }
  std::optional<int> get(const Vertex& v) const;
  int at(const Vertex& v) const;

  /// Adds an assignment; re-adding the same spin is a no-op, a conflicting
  /// spin is an error.
  void set(const Vertex& v, int spin);

  /// The combined configuration; the two must agree on shared vertices.
  PartialConfiguration merged(const PartialConfiguration& other) const;
  /// Restriction of the domain to the given region.
  PartialConfiguration restricted(const Region& where) const;

  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  auto begin() const { return a_.begin(); }
  auto end() const { return a_.end(); }

  friend bool operator==(const PartialConfiguration&,
                         const PartialConfiguration&) = default;

 private:
  std::map<Vertex, int> a_;
};

inline PartialConfiguration merge(const PartialConfiguration& a,
                                  const PartialConfiguration& b) {
  return a.merged(b);
}

/// Single-site distribution over spins.
struct MarginalDistribution {
  std::vector<double> probs;
};

/// Distribution over joint assignments of `vars` (canonical order). Index of
/// an assignment is mixed-radix base q with the last variable fastest.
struct JointDistribution {
  std::vector<Vertex> vars;
  std::vector<double> probs;
};

/// Log Gibbs weight of `interior` given `context`: sum of log b over interior
/// vertices plus log A over every lattice edge with at least one endpoint in
/// the interior domain whose other endpoint is assigned (interior-interior
/// edges counted once). Returns -inf iff some factor is zero. The two domains
/// must be disjoint.
double log_weight(const SpinSystem& system, const PartialConfiguration& interior,
                  const PartialConfiguration& context);

}  // namespace latgibbs
