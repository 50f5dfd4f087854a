// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: vecmag_acceptance [id-or-name-or-tag ...]

#include <iostream>
#include <string>
#include <vector>

#include "vecmag/acceptance.hpp"

int main(int argc, char** argv) {
  vecmag::acceptance::Options opts;
  opts.only.assign(argv + 1, argv + argc);
  const auto results = vecmag::acceptance::run(opts);
  std::cout << vecmag::acceptance::to_text(results);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 && !results.empty() ? 0 : 1;
}
