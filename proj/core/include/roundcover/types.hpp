#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace roundcover {

using Element = std::uint32_t;
using ItemId = std::uint32_t;
using ScenarioId = std::uint32_t;
using OutcomeIndex = std::uint32_t;
using Cost = std::int64_t;
using Value = std::int64_t;

// Malformed input: bad ids, out-of-range parameters, inconsistent files.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The instance cannot be covered (under some realization or scenario).
// The CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An algorithm postcondition failed on an instance that was certified
// feasible. Never swallowed; the CLI maps this to exit code 3.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A computation refused to run because it would exceed its size guard.
class SizeGuardError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace roundcover
