// Dedicated acceptance runner: one pass/fail line per criterion, nonzero exit
// on any failure. The same battery backs the CLI's selftest subcommand.

#include <cstdio>

#include "awstab/selftest.hpp"

int main() {
  auto results = awstab::selftest::run_all();
  for (const auto& r : results) std::printf("%s\n", awstab::selftest::format_line(r).c_str());
  bool ok = awstab::selftest::all_passed(results);
  std::printf(ok ? "ACCEPTANCE: all criteria passed\n" : "ACCEPTANCE: failures present\n");
  return ok ? 0 : 1;
}
