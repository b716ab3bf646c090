#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace latgibbs {

/// Invalid run configuration, incompatible options, or an infeasible model
/// setup supplied by the user. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A boundary condition or partial state with zero conditional weight.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Enumeration or transfer state-space limit exceeded. CLI exit code 4.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Recursion call allowance exhausted. CLI exit code 3. The run state that
/// threw retains the partial trace for diagnostics.
struct BudgetExhausted : std::runtime_error {
  BudgetExhausted(std::int64_t calls_used, std::int64_t budget)
      : std::runtime_error("call budget exhausted after " +
                           std::to_string(calls_used) + " calls (budget " +
                           std::to_string(budget) + ")"),
        calls(calls_used) {}
  std::int64_t calls;
};

}  // namespace latgibbs
