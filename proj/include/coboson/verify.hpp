#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coboson {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20130101;
  int cases = 2000;  // random cases per randomized check
};

/// Small-scale run of the invariants of the schmidt, chi, bounds and
/// transforms modules. Each check reports its worst observed deviation.
std::vector<CheckResult> run_invariant_suite(const VerifyOptions& options = {});

}  // namespace coboson
