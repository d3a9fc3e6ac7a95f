#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfcdd {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the full acceptance battery and streams one [PASS]/[FAIL] line per
// criterion to `out` as it completes. A criterion that throws is reported
// as failed with the exception text; the remaining criteria still run.
std::vector<CriterionResult> run_acceptance(std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sfcdd
