#pragma once

#include <string>
#include <vector>

namespace ergolab::verify {

struct CheckResult {
  std::string id;      // A1..A10
  std::string name;    // suite selector
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Suite selectors: mixing, rigidity, weaklimit, spectral, entropy, eq2,
// cocycle, rwm, triple, determinism, all.
const std::vector<std::string>& suite_names();

std::vector<CheckResult> run_acceptance(const std::string& selector);

// Prints one pass/fail line per check; returns the number of failures.
int report(const std::vector<CheckResult>& results);

}  // namespace ergolab::verify
