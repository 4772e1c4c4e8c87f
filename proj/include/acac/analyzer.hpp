#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acac/core_model.hpp"
#include "acac/dsl.hpp"
#include "acac/policy.hpp"
#include "acac/scenario.hpp"

namespace acac {

/// Candidate requests (their time is ignored) and the clock-advance step.
struct RequestUniverse {
  std::vector<Request> requests;
  Duration granularity = 0;

  bool operator==(const RequestUniverse&) const = default;
};

/// Every declared subject (and EVENT) matching a rule's source pattern,
/// crossed with every device matching its object pattern.
RequestUniverse derive_universe(const PolicySet& policy);

/// Lines `request <subject> <op> <object> <activity>` and
/// `granularity <duration>`; `#` starts a comment.
ParseResult<RequestUniverse> parse_universe(std::string_view text,
                                            std::string_view file = "<input>");

/// Clock advances explored from each state: the granularity, plus window+1
/// for every window the policy declares.
std::vector<Duration> clock_advances(const PolicySet& policy,
                                     const RequestUniverse& universe);

/// Incompatible and concurrent-must relations of `policy` followed by those
/// of `extra`. Other kinds are dropped.
std::vector<RelationDecl> safety_properties(
    const PolicySet& policy, const std::vector<RelationDecl>& extra = {});

/// First property violated by the live set, ignoring guards: two active
/// instances of an incompatible pair in scope, or a concurrent-must pair
/// with exactly one side active.
std::optional<RelationDecl> find_violation(
    const EcosystemState& state, const std::vector<RelationDecl>& properties);

struct AnalyzerOptions {
  std::size_t depth = 6;
  std::size_t workers = 1;
  std::vector<RelationDecl> properties;
};

/// One transition: a request at `time`, or a clock advance to `time`.
struct AnalyzerStep {
  std::optional<Request> request;
  Timestamp time = 0;

  bool operator==(const AnalyzerStep&) const = default;
};

struct Counterexample {
  std::vector<AnalyzerStep> steps;
  RelationDecl violated;
  std::vector<ActivityInstance> final_live;
};

struct AnalysisResult {
  bool safe = true;
  std::size_t depth = 0;
  std::size_t states = 0;
  std::optional<Counterexample> counterexample;
};

/// Breadth-first search over states reachable through permitted universe
/// requests and clock advances. The verdict and counterexample do not depend
/// on options.workers.
AnalysisResult analyze(const PolicySet& policy, const EcosystemState& initial,
                       const RequestUniverse& universe,
                       const AnalyzerOptions& options);

/// Replayable scenario: each request with `expect permit`.
Scenario to_scenario(const Counterexample& cex);

/// `SAFE depth=N`, or `# UNSAFE ...` comment lines followed by the
/// counterexample scenario.
std::string format_report(const AnalysisResult& result);

}  // namespace acac
