// SPDX-License-Identifier: Apache-2.0
//
// hardening: self-validation suite. Runs the library's invariants and
// consistency checks at reduced trial counts and reports machine-readable
// results; every failure carries the seed needed to replay it.

#ifndef HARDENING_VALIDATE_HPP
#define HARDENING_VALIDATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace hardening {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::uint64_t seed = 0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& check : checks) {
      if (!check.passed) return false;
    }
    return true;
  }

  /// JSON document: {"all_passed": ..., "checks": [{name, passed, detail,
  /// seed}, ...]}.
  std::string to_json() const;
};

struct ValidateOptions {
  std::uint64_t seed = 1;
  /// Base Monte-Carlo trial count; individual checks scale it as needed.
  std::uint64_t trials = 20000;
  unsigned workers = 0;
};

ValidationReport run_validate(const ValidateOptions& options = {});

/// Predicates the validation suite is built from, exposed so tests can
/// fault-inject against them.
namespace checks {

/// Steering vectors have unit euclidean norm (|norm - 1| <= 1e-12).
bool steering_norm_ok(const Eigen::VectorXcd& steering);

}  // namespace checks

}  // namespace hardening

#endif  // HARDENING_VALIDATE_HPP
