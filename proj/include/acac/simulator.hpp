#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acac/core_model.hpp"
#include "acac/engine.hpp"
#include "acac/policy.hpp"
#include "acac/scenario.hpp"

namespace acac {

struct TraceEntry {
  std::size_t index = 0;
  TimedEvent event;
  std::optional<Decision> decision;
  std::string line;
  std::string digest;
};

struct ScenarioTrace {
  std::vector<TraceEntry> entries;
  EcosystemState final_state;
};

struct ExpectationFailure {
  std::size_t event_index = 0;
  Expectation expected;
  Decision actual;
  std::string line;

  std::string to_string() const;
};

/// The trace covers every event up to and including a failed expectation.
struct RunResult {
  ScenarioTrace trace;
  std::optional<ExpectationFailure> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

/// Replays `scenario` from initial_state(policy). Propagates EngineError and
/// ModelError (e.g. stopping an activity that is not live).
RunResult run(const PolicySet& policy, const Scenario& scenario);
RunResult run(const PolicySet& policy, const Scenario& scenario,
              const EcosystemState& initial);

/// 16 hex digits of FNV-1a over the sorted canonical lines of the live set,
/// counters and environment. The clock and history are not included.
std::string state_digest(const EcosystemState& state);

/// Trace lines, each followed by `# digest <hex>`.
std::string format_trace(const ScenarioTrace& trace);

/// Devices or subjects used by the scenario but not
/// declared by the policy, one message per problem.
std::vector<std::string> validate_scenario(const PolicySet& policy,
                                           const Scenario& scenario);

}  // namespace acac
