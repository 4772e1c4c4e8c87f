#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acac/core_model.hpp"

namespace acac {

enum class DenyReason {
  NoMatchingRule,
  PreFailed,
  CurFailed,
  ContextFailed,
  LimitExceeded,
  RelationIncompatible,
  RelationOrdered,
  RelationDependence,
  RelationPrecedence,
  ObligationFailed,
};

std::string_view to_string(DenyReason r);
std::optional<DenyReason> parse_deny_reason(std::string_view code);

struct RequestEvent {
  EntityId subject;
  EntityId op;
  EntityId object;
  EntityId activity;

  bool operator==(const RequestEvent&) const = default;
};

struct EnvEvent {
  std::string name;
  AttributeValue value;

  bool operator==(const EnvEvent&) const = default;
};

/// Subject-less trigger. Starts run the full decision pipeline as requests
/// from EVENT with op TRIGGER; stops complete the live instance.
struct DeviceEvent {
  EntityId object;
  EntityId activity;
  bool start = true;

  bool operator==(const DeviceEvent&) const = default;
};

using ScenarioEvent = std::variant<RequestEvent, EnvEvent, DeviceEvent>;

struct TimedEvent {
  Timestamp time = 0;
  ScenarioEvent event;

  bool operator==(const TimedEvent&) const = default;
};

struct Expectation {
  bool permit = true;
  std::optional<DenyReason> reason;

  bool operator==(const Expectation&) const = default;
};

std::string to_string(const Expectation& e);

struct Scenario {
  std::vector<TimedEvent> events;
  /// Keyed by the index in `events` of the request being checked.
  std::map<std::size_t, Expectation> expectations;

  bool operator==(const Scenario&) const = default;
};

}  // namespace acac
