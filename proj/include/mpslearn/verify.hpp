#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mpslearn {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

/// Names accepted by run_suite, without "all".
const std::vector<std::string>& suite_names();

/// Runs one named suite, or every suite for "all". Throws BadParameter for
/// unknown names.
std::vector<SuiteResult> run_suite(std::string_view name, std::uint64_t seed);

SuiteResult rank_suite(std::uint64_t seed);
SuiteResult eckart_young_suite(std::uint64_t seed);
SuiteResult monotonicity_suite(std::uint64_t seed);
SuiteResult layer_bounds_suite(std::uint64_t seed);
SuiteResult lambert_suite(std::uint64_t seed);
SuiteResult plan_suite(std::uint64_t seed);
SuiteResult dominance_suite(std::uint64_t seed);

}  // namespace mpslearn
