#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sunsc {

struct InvariantResult {
  std::string suite;
  std::string name;
  double deviation = 0.0;  // max observed, or min for lower-bound checks
  double tolerance = 0.0;
  bool lower_bound = false;  // pass iff deviation > tolerance

  bool passed() const { return lower_bound ? deviation > tolerance : deviation <= tolerance; }
};

const std::vector<std::string>& check_suite_names();

/// Runs one suite, or every suite for "all". Throws ConfigError on an unknown
/// name.
std::vector<InvariantResult> run_check_suite(const std::string& name, std::uint64_t seed = 0);

void print_check_summary(std::ostream& os, const std::vector<InvariantResult>& results);

}  // namespace sunsc
