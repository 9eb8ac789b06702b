// One line per acceptance criterion; exits nonzero when any criterion fails.
#include <cstdio>

#include "bosegas/validation.hpp"

using namespace bosegas;

int main() {
  int failed = 0;
  for (const auto& key : suite_keys(Suite::Acceptance)) {
    CheckResult r = run_check(key);
    std::printf("criterion %2d %s  %s (%.1f s): %s\n", r.criterion, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.runtime_ms / 1e3, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, suite_keys(Suite::Acceptance).size());
  return failed == 0 ? 0 : 1;
}
