#include "fixtures.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acac/dsl.hpp"

namespace acac::testing {

namespace fs = std::filesystem;

std::string fixture_path(const std::string& relative) {
  return (fs::path(ACAC_FIXTURE_DIR) / relative).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

template <class T>
T unwrap(ParseResult<T> r, const std::string& file) {
  if (r.ok()) return std::move(*r.value);
  std::string msg = "failed to parse " + file;
  for (const auto& e : r.errors) msg += "\n  " + e.to_string();
  throw std::runtime_error(msg);
}

std::vector<std::string> sorted_files(const std::string& dir,
                                      const std::string& ext) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(fixture_path(dir))) {
    if (e.path().extension() == ext) {
      out.push_back(dir + "/" + e.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

PolicySet load_policy(const std::string& relative) {
  return unwrap(parse_policy(read_file(fixture_path(relative)), relative),
                relative);
}

Scenario load_scenario(const std::string& relative) {
  return unwrap(parse_scenario(read_file(fixture_path(relative)), relative),
                relative);
}

std::vector<FixturePair> example_pairs() {
  std::vector<FixturePair> out;
  for (const auto& sc : sorted_files("examples", ".acsc")) {
    out.push_back({sc.substr(0, sc.size() - 5) + ".acac", sc});
  }
  return out;
}

std::vector<FixturePair> fixture_pairs() {
  std::vector<FixturePair> out = example_pairs();
  // relations/<kind>_<case>.acsc runs against relations/<kind>.acac.
  for (const auto& sc : sorted_files("relations", ".acsc")) {
    const std::string stem = sc.substr(0, sc.rfind('_'));
    out.push_back({stem + ".acac", sc});
  }
  return out;
}

}  // namespace acac::testing
