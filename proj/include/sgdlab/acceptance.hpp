#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sgdlab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;
  bool all_pass = false;
};

// suite is "fast" or "full"; the only difference is Monte Carlo replica
// counts, every tolerance is identical
SuiteReport run_suite(const std::string& suite, std::uint64_t seed);

std::string report_json(const SuiteReport& report);

}  // namespace sgdlab::acceptance
