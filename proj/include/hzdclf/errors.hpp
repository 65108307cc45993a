#pragma once

#include <stdexcept>
#include <string>

namespace hzdclf {

// Numerical failure in a solver or factorization (CARE divergence,
// singular KKT system, non-finite values, ...). Maps to CLI exit code 1.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// A constraint Jacobian lost row rank (or a constraint set is inconsistent).
// Carries the offending constraint name so callers can report it.
class DegenerateConstraintError : public SolverError {
 public:
  DegenerateConstraintError(const std::string& constraint, const std::string& what)
      : SolverError(what), constraint_(constraint) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

// Bad caller input: dimension mismatches, invalid parameters, unknown names.
// Maps to CLI exit code 2 together with file/parse problems.
class InvalidArgumentError : public std::invalid_argument {
 public:
  explicit InvalidArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Configuration / file-format problem (missing file, schema mismatch,
// unknown field, malformed JSON). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hzdclf
