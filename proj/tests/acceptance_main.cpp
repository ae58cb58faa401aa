// Acceptance gate: one pass/fail line per criterion.  Exit status is the
// number of failing criteria, so the suite doubles as a ctest entry.

#include <cstdio>
#include <string>

#include "ergolab/verify.hpp"

int main(int argc, char** argv) {
  const std::string selector = argc > 1 ? argv[1] : "all";
  try {
    const auto results = ergolab::verify::run_acceptance(selector);
    const int failures = ergolab::verify::report(results);
    std::printf("%zu checks, %d failed\n", results.size(), failures);
    return failures;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 64;
  }
}
