#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acac/core_model.hpp"
#include "acac/policy.hpp"
#include "acac/scenario.hpp"

namespace acac {

/// Op carried by requests synthesised from device start events.
const EntityId& trigger_op();

struct Preemption {
  EntityId device;
  EntityId activity;
  ActivityStatus effect = ActivityStatus::Halted;

  bool operator==(const Preemption&) const = default;
};

struct Decision {
  bool permit = false;
  std::optional<DenyReason> reason;
  std::optional<std::size_t> matched_rule;
  std::vector<ObligationAction> executed_obligations;
  std::vector<Preemption> preempted;
  std::vector<LiveKey> revoked;
  /// Instances started by relations (concurrent-must, dependence).
  std::vector<LiveKey> started;
  std::vector<LiveKey> resumed;
  /// Human-readable cause for denials; not part of the trace.
  std::string note;

  bool operator==(const Decision&) const = default;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Outcome {
  EcosystemState state;
  Decision decision;
};

/// Evaluates `request` and, on Permit, commits it atomically. The policy
/// must already have passed validate(). Throws EngineError when the request
/// predates the state's clock.
Outcome decide_and_commit(const EcosystemState& state, const PolicySet& policy,
                          const Request& request);

struct EventOutcome {
  EcosystemState state;
  /// Present for requests and device start events.
  std::optional<Decision> decision;
  /// Continuity effects of env updates and stop events.
  std::vector<LiveKey> revoked;
  std::vector<LiveKey> resumed;
  std::vector<LiveKey> started;
  std::vector<Preemption> preempted;
};

/// Throws ModelError when a stop event names an activity that is not live.
EventOutcome apply_event(const EcosystemState& state, const PolicySet& policy,
                         Timestamp time, const ScenarioEvent& event);

/// `<time> <subject> <op> <object> <activity> -> PERMIT|DENY(<reason>) ...`
std::string format_decision_line(const Request& request,
                                 const Decision& decision);

/// Trace line for any scenario event; requests and device starts use
/// format_decision_line.
std::string format_event_line(Timestamp time, const ScenarioEvent& event,
                              const EventOutcome& outcome);

}  // namespace acac
