// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hbmlab/hbm.hpp"
#include "hbmlab/lattice.hpp"

namespace hbmlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Möbius function used by the naive transform checks. Tests replace it
  /// with a corrupted one to confirm the round-trip checks fail.
  std::function<int(const Outcome&, const Outcome&)> mobius = hbmlab::mobius;
};

/// Order-k model with theta over B drawn from U[-scale, scale], normalized.
HbmModel random_hbm(unsigned n, unsigned k, std::uint64_t seed, double scale = 1.0);

/// Strictly positive distribution with entries drawn from U[0.05, 1), normalized.
DenseDistribution random_positive_distribution(unsigned n, std::uint64_t seed);

/// Runs every oracle and invariant check; one result per check.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

/// {"check": ..., "passed": ..., "measured": ..., "threshold": ..., "detail": ...}
std::string to_json_line(const CheckResult& result);

}  // namespace hbmlab
