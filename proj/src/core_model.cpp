#include "acac/core_model.hpp"

#include <algorithm>
#include <charconv>

namespace acac {

EntityId::EntityId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) {
    throw std::invalid_argument("entity id must not be empty");
  }
}

const EntityId& event_subject() {
  static const EntityId id{"EVENT"};
  return id;
}

const EntityId& inactive_activity() {
  static const EntityId id{"inactive"};
  return id;
}

std::string_view kind_name(const AttributeValue& v) {
  switch (v.index()) {
    case 0:
      return "number";
    case 1:
      return "string";
    default:
      return "boolean";
  }
}

std::string to_string(const AttributeValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, end);
  }
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<bool>(v) ? "true" : "false";
}

std::string_view to_string(SubjectKind k) {
  switch (k) {
    case SubjectKind::User:
      return "user";
    case SubjectKind::Device:
      return "device";
    case SubjectKind::Event:
      return "event";
  }
  return "?";
}

std::string_view to_string(ActivityStatus s) {
  switch (s) {
    case ActivityStatus::Active:
      return "active";
    case ActivityStatus::Halted:
      return "halted";
    case ActivityStatus::Completed:
      return "completed";
    case ActivityStatus::Aborted:
      return "aborted";
  }
  return "?";
}

std::string_view to_string(CounterScope s) {
  switch (s) {
    case CounterScope::PerSource:
      return "per-source";
    case CounterScope::PerObject:
      return "per-object";
    case CounterScope::SystemWide:
      return "system-wide";
  }
  return "?";
}

std::string_view to_string(ModelErrorCode c) {
  switch (c) {
    case ModelErrorCode::UnknownDevice:
      return "UnknownDevice";
    case ModelErrorCode::AlreadyActive:
      return "AlreadyActive";
    case ModelErrorCode::NotActive:
      return "NotActive";
    case ModelErrorCode::NotHalted:
      return "NotHalted";
    case ModelErrorCode::ClockRegression:
      return "ClockRegression";
  }
  return "?";
}

std::string to_string(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Id:
      return p.name.str();
    case Pattern::Kind::Type:
      return "type:" + p.name.str();
    case Pattern::Kind::Group:
      return "group:" + p.name.str();
    case Pattern::Kind::Any:
      return "ANY";
    case Pattern::Kind::Requester:
      return "SUBJECT";
    case Pattern::Kind::Target:
      return "OBJECT";
  }
  return "?";
}

std::string to_string(const ActivityRef& a) {
  switch (a.kind) {
    case ActivityRef::Kind::Named:
      return a.name.str();
    case ActivityRef::Kind::Any:
      return "ANY";
    case ActivityRef::Kind::Inactive:
      return "inactive";
  }
  return "?";
}

const DeviceObject* EcosystemState::find_device(const EntityId& id) const {
  auto it = devices.find(id);
  return it == devices.end() ? nullptr : &it->second;
}

const Subject* EcosystemState::find_subject(const EntityId& id) const {
  auto it = subjects.find(id);
  return it == subjects.end() ? nullptr : &it->second;
}

const ActivityInstance* EcosystemState::find_live(
    const EntityId& device, const EntityId& activity) const {
  auto it = live.find({device, activity});
  return it == live.end() ? nullptr : &it->second;
}

EcosystemState make_state(std::vector<DeviceObject> devices,
                          std::vector<Subject> subjects, AttributeMap env) {
  EcosystemState state;
  for (auto& d : devices) {
    auto id = d.id;
    state.devices.emplace(std::move(id), std::move(d));
  }
  for (auto& s : subjects) {
    auto id = s.id;
    state.subjects.emplace(std::move(id), std::move(s));
  }
  state.subjects[event_subject()] =
      Subject{event_subject(), SubjectKind::Event, {}, {}};
  state.environment = std::move(env);
  return state;
}

EcosystemState advance_clock(EcosystemState state, Timestamp to) {
  if (to < state.clock) {
    throw ModelError(ModelErrorCode::ClockRegression,
                     "clock cannot move from " + std::to_string(state.clock) +
                         " back to " + std::to_string(to));
  }
  state.clock = to;
  return state;
}

EcosystemState start_activity(EcosystemState state, const EntityId& device,
                              const EntityId& activity,
                              const EntityId& initiator,
                              std::optional<std::size_t> origin_rule) {
  if (!state.find_device(device)) {
    throw ModelError(ModelErrorCode::UnknownDevice,
                     "unknown device " + device.str());
  }
  LiveKey key{device, activity};
  if (state.live.contains(key)) {
    throw ModelError(ModelErrorCode::AlreadyActive,
                     activity.str() + " already live on " + device.str());
  }
  ActivityInstance inst;
  inst.device = device;
  inst.activity = activity;
  inst.initiator = initiator;
  inst.start_time = state.clock;
  inst.origin_rule = origin_rule;
  state.live.emplace(std::move(key), std::move(inst));

  const Timestamp now = state.clock;
  state.counters[{CounterScope::PerSource, activity, initiator}].push_back(now);
  state.counters[{CounterScope::PerObject, activity, device}].push_back(now);
  state.counters[{CounterScope::SystemWide, activity, std::nullopt}].push_back(
      now);
  return state;
}

EcosystemState stop_activity(EcosystemState state, const EntityId& device,
                             const EntityId& activity, ActivityStatus mode,
                             std::optional<EntityId> ended_by) {
  if (mode != ActivityStatus::Completed && mode != ActivityStatus::Aborted) {
    throw std::invalid_argument("stop mode must be completed or aborted");
  }
  auto it = state.live.find({device, activity});
  if (it == state.live.end()) {
    throw ModelError(ModelErrorCode::NotActive,
                     activity.str() + " is not live on " + device.str());
  }
  ActivityInstance inst = std::move(it->second);
  state.live.erase(it);
  inst.status = mode;
  inst.end_time = state.clock;
  inst.ended_by = std::move(ended_by);
  state.history.push_back(std::move(inst));
  return state;
}

EcosystemState halt_activity(EcosystemState state, const EntityId& device,
                             const EntityId& activity) {
  auto it = state.live.find({device, activity});
  if (it == state.live.end() ||
      it->second.status != ActivityStatus::Active) {
    throw ModelError(ModelErrorCode::NotActive,
                     activity.str() + " is not active on " + device.str());
  }
  it->second.status = ActivityStatus::Halted;
  return state;
}

EcosystemState resume_activity(EcosystemState state, const EntityId& device,
                               const EntityId& activity) {
  auto it = state.live.find({device, activity});
  if (it == state.live.end() ||
      it->second.status != ActivityStatus::Halted) {
    throw ModelError(ModelErrorCode::NotHalted,
                     activity.str() + " is not halted on " + device.str());
  }
  it->second.status = ActivityStatus::Active;
  return state;
}

bool matches_device(const Pattern& p, const DeviceObject& device) {
  switch (p.kind) {
    case Pattern::Kind::Id:
      return p.name == device.id;
    case Pattern::Kind::Type:
      return p.name == device.object_type;
    case Pattern::Kind::Group:
      return device.groups.contains(p.name);
    case Pattern::Kind::Any:
      return true;
    case Pattern::Kind::Requester:
    case Pattern::Kind::Target:
      return false;
  }
  return false;
}

bool matches_subject(const Pattern& p, const EcosystemState& state,
                     const EntityId& subject) {
  switch (p.kind) {
    case Pattern::Kind::Any:
      return true;
    case Pattern::Kind::Id:
      return p.name == subject;
    case Pattern::Kind::Type: {
      const Subject* s = state.find_subject(subject);
      if (!s) return false;
      if (p.name.str() == to_string(s->kind)) return true;
      const DeviceObject* d = state.find_device(subject);
      return s->kind == SubjectKind::Device && d && d->object_type == p.name;
    }
    case Pattern::Kind::Group: {
      const Subject* s = state.find_subject(subject);
      const DeviceObject* d = state.find_device(subject);
      return s && s->kind == SubjectKind::Device && d &&
             d->groups.contains(p.name);
    }
    case Pattern::Kind::Requester:
    case Pattern::Kind::Target:
      return false;
  }
  return false;
}

namespace {

bool activity_matches(const ActivityRef& ref, const EntityId& activity) {
  switch (ref.kind) {
    case ActivityRef::Kind::Named:
      return ref.name == activity;
    case ActivityRef::Kind::Any:
    case ActivityRef::Kind::Inactive:
      return true;
  }
  return false;
}

}  // namespace

std::vector<ActivityInstance> query_state(const EcosystemState& state,
                                          Phase phase,
                                          const ActivityRef& activity,
                                          const Pattern& object,
                                          const Pattern& source,
                                          std::optional<Duration> window) {
  std::vector<ActivityInstance> out;
  auto device_ok = [&](const EntityId& id) {
    const DeviceObject* d = state.find_device(id);
    return d && matches_device(object, *d);
  };

  if (phase == Phase::Pre) {
    for (const auto& inst : state.history) {
      if (!activity_matches(activity, inst.activity)) continue;
      if (!device_ok(inst.device)) continue;
      if (!matches_subject(source, state, inst.initiator)) continue;
      if (window && inst.end_time && *inst.end_time < state.clock - *window) {
        continue;
      }
      out.push_back(inst);
    }
    return out;
  }

  if (activity.kind != ActivityRef::Kind::Inactive) {
    for (const auto& [key, inst] : state.live) {
      if (inst.status != ActivityStatus::Active) continue;
      if (!activity_matches(activity, inst.activity)) continue;
      if (!device_ok(inst.device)) continue;
      if (!matches_subject(source, state, inst.initiator)) continue;
      out.push_back(inst);
    }
    return out;
  }

  for (const auto& [id, device] : state.devices) {
    if (!matches_device(object, device)) continue;
    bool busy = false;
    for (auto it = state.live.lower_bound({id, EntityId{}});
         it != state.live.end() && it->first.first == id; ++it) {
      if (it->second.status == ActivityStatus::Active) {
        busy = true;
        break;
      }
    }
    if (busy) continue;
    auto last = std::find_if(
        state.history.rbegin(), state.history.rend(),
        [&](const ActivityInstance& h) { return h.device == id; });
    if (last != state.history.rend()) {
      if (matches_subject(source, state, last->attributed_source())) {
        out.push_back(*last);
      }
    } else if (source.kind == Pattern::Kind::Any) {
      ActivityInstance placeholder;
      placeholder.device = id;
      placeholder.activity = inactive_activity();
      placeholder.initiator = event_subject();
      placeholder.status = ActivityStatus::Completed;
      placeholder.end_time = 0;
      out.push_back(std::move(placeholder));
    }
  }
  return out;
}

std::size_t count_in_window(const EcosystemState& state, const CounterKey& key,
                            Duration window) {
  auto it = state.counters.find(key);
  if (it == state.counters.end() || window <= 0) return 0;
  const Timestamp bucket_start = (state.clock / window) * window;
  return static_cast<std::size_t>(std::count_if(
      it->second.begin(), it->second.end(), [&](Timestamp t) {
        return t >= bucket_start && t <= state.clock;
      }));
}

}  // namespace acac
