#include "latgibbs/spin_system.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace latgibbs {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }
}  // namespace

SpinSystem::SpinSystem(int q, std::vector<double> field,
                       std::vector<std::vector<double>> interaction)
    : q_(q), field_(std::move(field)) {
  if (q_ < 2) throw std::invalid_argument("spin system needs q >= 2");
  if (field_.size() != static_cast<std::size_t>(q_))
    throw std::invalid_argument("field vector has wrong length");
  if (interaction.size() != static_cast<std::size_t>(q_))
    throw std::invalid_argument("interaction matrix has wrong shape");

  bool some_field_positive = false;
  for (double b : field_) {
    if (!std::isfinite(b) || b < 0.0)
      throw std::invalid_argument("field entries must be finite and >= 0");
    if (b > 0.0) some_field_positive = true;
  }
  if (!some_field_positive)
    throw std::invalid_argument("field vector must have a positive entry");

  coupling_.resize(static_cast<std::size_t>(q_) * q_);
  for (int i = 0; i < q_; ++i) {
    if (interaction[i].size() != static_cast<std::size_t>(q_))
      throw std::invalid_argument("interaction matrix has wrong shape");
    for (int j = 0; j < q_; ++j) {
      double a = interaction[i][j];
      if (!std::isfinite(a) || a < 0.0)
        throw std::invalid_argument(
            "interaction entries must be finite and >= 0");
      coupling_[i * q_ + j] = a;
    }
  }
  for (int i = 0; i < q_; ++i)
    for (int j = i + 1; j < q_; ++j)
      if (coupling_[i * q_ + j] != coupling_[j * q_ + i])
        throw std::invalid_argument("interaction matrix must be symmetric");

  log_field_.resize(field_.size());
  for (std::size_t i = 0; i < field_.size(); ++i)
    log_field_[i] = safe_log(field_[i]);
  log_coupling_.resize(coupling_.size());
  for (std::size_t i = 0; i < coupling_.size(); ++i)
    log_coupling_[i] = safe_log(coupling_[i]);

  strictly_positive_ = true;
  for (double a : coupling_)
    if (a <= 0.0) strictly_positive_ = false;
  for (int i = 0; i < q_ && !soft_row_; ++i) {
    bool all_positive = true;
    for (int j = 0; j < q_; ++j)
      if (coupling_[i * q_ + j] <= 0.0) all_positive = false;
    if (all_positive) soft_row_ = i;
  }
  monotone_eligible_ =
      q_ == 2 && coupling_[0] * coupling_[3] >= coupling_[1] * coupling_[2];
}

PartialConfiguration PartialConfiguration::constant(const Region& where,
                                                    int spin) {
  PartialConfiguration c;
  for (const Vertex& v : where) c.a_.emplace(v, spin);
  return c;
}

std::optional<int> PartialConfiguration::get(const Vertex& v) const {
  auto it = a_.find(v);
  if (it == a_.end()) return std::nullopt;
  return it->second;
}

int PartialConfiguration::at(const Vertex& v) const {
  auto it = a_.find(v);
  if (it == a_.end())
    throw std::invalid_argument("configuration has no spin at requested vertex");
  return it->second;
}

void PartialConfiguration::set(const Vertex& v, int spin) {
  auto [it, inserted] = a_.emplace(v, spin);
  if (!inserted && it->second != spin)
    throw std::invalid_argument("conflicting spin assignment");
}

PartialConfiguration PartialConfiguration::merged(
    const PartialConfiguration& other) const {
  PartialConfiguration out = *this;
  for (const auto& [v, s] : other) out.set(v, s);
  return out;
}

PartialConfiguration PartialConfiguration::restricted(
    const Region& where) const {
  PartialConfiguration out;
  for (const auto& [v, s] : a_)
    if (where.contains(v)) out.a_.emplace(v, s);
  return out;
}

double log_weight(const SpinSystem& system, const PartialConfiguration& interior,
                  const PartialConfiguration& context) {
  const PartialConfiguration& small =
      interior.size() <= context.size() ? interior : context;
  const PartialConfiguration& large =
      interior.size() <= context.size() ? context : interior;
  for (const auto& [v, s] : small)
    if (large.contains(v))
      throw std::invalid_argument("interior and context domains overlap");

  constexpr std::int32_t dx[4] = {1, -1, 0, 0};
  constexpr std::int32_t dy[4] = {0, 0, 1, -1};
  double lw = 0.0;
  for (const auto& [v, s] : interior) {
    lw += system.log_field(s);
    for (int d = 0; d < 4; ++d) {
      Vertex n{v.x + dx[d], v.y + dy[d]};
      if (auto t = interior.get(n)) {
        if (v < n) lw += system.log_coupling(s, *t);  // count each edge once
      } else if (auto c = context.get(n)) {
        lw += system.log_coupling(s, *c);
      }
    }
  }
  return lw;
}

}  // namespace latgibbs
