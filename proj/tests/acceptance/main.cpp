// Runs every acceptance check and prints one line per criterion.
// Usage: fogserve_acceptance [--quick] [--only C3] [--seed N]
#include <cstdio>
#include <cstring>
#include <string>

#include "fogserve/verify/acceptance.hpp"

int main(int argc, char** argv) {
  fogserve::verify::SuiteOptions options;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--quick")) options.quick = true;
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = argv[++i];
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) options.seed = std::stoull(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--quick] [--only ID] [--seed N]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0, run = 0;
  for (const auto& info : fogserve::verify::criteria()) {
    if (!only.empty() && info.id != only) continue;
    const auto r = fogserve::verify::run_criterion(info.id, options);
    std::printf("%s\n", fogserve::verify::format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.passed;
    ++run;
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
