#pragma once

#include <stdexcept>
#include <string>

namespace vmfbs {

/// Caller passed inconsistent arguments (dimension mismatch, infeasible start, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An oracle was queried outside the set where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Solver, schedule or term configuration violates its contract.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested operation has no implementation for this term.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Backtracking ran out of trials.
class SearchFailure : public std::runtime_error {
 public:
  SearchFailure(const std::string& what, int backtracks, double last_trial)
      : std::runtime_error(what), backtracks_(backtracks), last_trial_(last_trial) {}

  int backtracks() const noexcept { return backtracks_; }
  double last_trial() const noexcept { return last_trial_; }

 private:
  int backtracks_;
  double last_trial_;
};

}  // namespace vmfbs
