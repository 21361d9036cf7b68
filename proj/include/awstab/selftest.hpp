#pragma once

#include <string>
#include <vector>

namespace awstab::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Full acceptance battery, one result per criterion, in order.
std::vector<CriterionResult> run_all();

bool all_passed(const std::vector<CriterionResult>& rs);

/// "PASS criterion 3: seam continuity ..." one line per criterion.
std::string format_line(const CriterionResult& r);

}  // namespace awstab::selftest
