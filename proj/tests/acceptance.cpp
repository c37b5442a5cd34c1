#include <cstdio>

#include "swankit/acceptance.hpp"

int main() {
  int failed = 0;
  swankit::run_acceptance([&](const swankit::CriterionResult& r) {
    std::printf("%s\n", swankit::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
