#pragma once

#include <string>
#include <vector>

#include "acac/policy.hpp"
#include "acac/scenario.hpp"

namespace acac::testing {

/// Absolute path of a file under fixtures/.
std::string fixture_path(const std::string& relative);
std::string read_file(const std::string& path);

/// Parses a fixture; throws std::runtime_error with the parse errors.
PolicySet load_policy(const std::string& relative);
Scenario load_scenario(const std::string& relative);

struct FixturePair {
  std::string policy;
  std::string scenario;
};

/// Every (policy, scenario) pair under fixtures/, examples first.
std::vector<FixturePair> fixture_pairs();
std::vector<FixturePair> example_pairs();

}  // namespace acac::testing
