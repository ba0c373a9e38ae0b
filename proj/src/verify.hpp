#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sasaki::verify {

/// Outcome of one named invariant check.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 42;
  /// Test fixture: corrupts the K coefficient inside the sharpness check so
  /// the negative-control path can observe a named failure.
  bool corrupt_k = false;
};

/// Runs every module invariant and returns one result per named check.
std::vector<CheckResult> run_all(const Options& opts);

}  // namespace sasaki::verify
