#include "acac/simulator.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>

namespace acac {
namespace {

bool expectation_met(const Expectation& ex, const Decision& d) {
  if (ex.permit) return d.permit;
  if (d.permit) return false;
  return !ex.reason || ex.reason == d.reason;
}

std::string decision_text(const Decision& d) {
  if (d.permit) return "permit";
  return "deny:" + std::string(to_string(*d.reason));
}

}  // namespace

std::string ExpectationFailure::to_string() const {
  return "event " + std::to_string(event_index) + ": expected " +
         acac::to_string(expected) + ", got " + decision_text(actual) +
         " (" + line + ")";
}

RunResult run(const PolicySet& policy, const Scenario& scenario) {
  return run(policy, scenario, initial_state(policy));
}

RunResult run(const PolicySet& policy, const Scenario& scenario,
              const EcosystemState& initial) {
  RunResult result;
  EcosystemState state = initial;
  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    const TimedEvent& te = scenario.events[i];
    EventOutcome out = apply_event(state, policy, te.time, te.event);
    TraceEntry entry;
    entry.index = i;
    entry.event = te;
    entry.line = format_event_line(te.time, te.event, out);
    entry.decision = out.decision;
    entry.digest = state_digest(out.state);
    state = std::move(out.state);
    result.trace.entries.push_back(std::move(entry));

    auto ex = scenario.expectations.find(i);
    if (ex != scenario.expectations.end() &&
        result.trace.entries.back().decision &&
        !expectation_met(ex->second, *result.trace.entries.back().decision)) {
      result.failure = ExpectationFailure{
          i, ex->second, *result.trace.entries.back().decision,
          result.trace.entries.back().line};
      break;
    }
  }
  result.trace.final_state = std::move(state);
  return result;
}

std::string state_digest(const EcosystemState& state) {
  std::vector<std::string> lines;
  for (const auto& [key, inst] : state.live) {
    lines.push_back("live " + inst.device.str() + " " + inst.activity.str() +
                    " " + inst.initiator.str() + " " +
                    std::to_string(inst.start_time) + " " +
                    std::string(to_string(inst.status)));
  }
  for (const auto& [key, times] : state.counters) {
    std::string line = "counter " + std::string(to_string(key.scope)) + " " +
                       key.activity.str() + " " +
                       (key.subject_or_object ? key.subject_or_object->str()
                                              : std::string("-"));
    for (Timestamp t : times) line += " " + std::to_string(t);
    lines.push_back(std::move(line));
  }
  for (const auto& [name, value] : state.environment) {
    lines.push_back("env " + name + " " + std::string(kind_name(value)) + ":" +
                    to_string(value));
  }
  std::sort(lines.begin(), lines.end());

  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& line : lines) {
    for (unsigned char c : line) mix(c);
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_trace(const ScenarioTrace& trace) {
  std::string out;
  for (const auto& e : trace.entries) {
    out += e.line;
    out += "\n# digest ";
    out += e.digest;
    out += '\n';
  }
  return out;
}

std::vector<std::string> validate_scenario(const PolicySet& policy,
                                           const Scenario& scenario) {
  std::set<EntityId> devices;
  for (const auto& d : policy.devices) devices.insert(d.id);
  std::set<EntityId> subjects{event_subject()};
  for (const auto& s : policy.subjects) subjects.insert(s.id);

  std::vector<std::string> problems;
  auto check_device = [&](std::size_t i, const EntityId& id) {
    if (!devices.contains(id)) {
      problems.push_back("event " + std::to_string(i) + ": unknown device " +
                         id.str());
    }
  };
  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    const auto& ev = scenario.events[i].event;
    if (const auto* r = std::get_if<RequestEvent>(&ev)) {
      if (!subjects.contains(r->subject)) {
        problems.push_back("event " + std::to_string(i) +
                           ": unknown subject " + r->subject.str());
      }
      check_device(i, r->object);
    } else if (const auto* d = std::get_if<DeviceEvent>(&ev)) {
      check_device(i, d->object);
    }
  }
  return problems;
}

}  // namespace acac
