#include <cstdio>
#include <cstdlib>
#include <string>

#include "sgdlab/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "fast";
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 42;
  const auto report = sgdlab::acceptance::run_suite(suite, seed);
  for (const auto& r : report.results)
    std::printf("criterion %2d [%s]: %s%s%s%s  (%.1fs)\n", r.id, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.detail.empty() ? "" : "  — ",
                r.detail.c_str(), "", r.seconds);
  std::printf("%s\n", report.all_pass ? "all criteria passed" : "CRITERIA FAILED");
  return report.all_pass ? 0 : 1;
}
