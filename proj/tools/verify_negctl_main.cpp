// Negative control: this binary is built with PLR_INJECT_THRESHOLD_BUG, which
// deliberately miscalibrates the shrinkage threshold inside the verification
// suites. The suites must notice and exit nonzero; the test harness registers
// this binary with inverted pass/fail semantics.
#include <cstdint>
#include <iostream>

#include "plr/verify.hpp"

int main() {
  bool all_ok = true;
  for (const auto& suite : plr::verify::run_all(60, 20260814ull)) {
    std::cout << suite.name << ": " << suite.passed << " passed, " << suite.failed
              << " failed\n";
    all_ok = all_ok && suite.ok();
  }
  if (all_ok) {
    std::cerr << "negative control did not trip: the suites missed an injected bug\n";
    return 0;  // harness inverts this: returning success FAILS the meta-test
  }
  return 4;
}
