#pragma once

#include <string>
#include <vector>

namespace blowup {

/// One line of a property-suite report.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace blowup
