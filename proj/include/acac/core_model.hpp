#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace acac {

/// Seconds on the simulated clock. Wall-clock time is never consulted.
using Timestamp = std::int64_t;
using Duration = std::int64_t;

inline constexpr Duration kSecondsPerDay = 86400;

/// Case-sensitive identifier for devices, subjects and activities.
class EntityId {
 public:
  EntityId() = default;
  explicit EntityId(std::string name);

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  auto operator<=>(const EntityId&) const = default;

 private:
  std::string name_;
};

namespace literals {
inline EntityId operator""_id(const char* s, std::size_t n) {
  return EntityId(std::string(s, n));
}
}  // namespace literals

/// Distinguished initiator for subject-less triggers.
const EntityId& event_subject();
/// Reserved pseudo-activity: the device holds no active instance.
const EntityId& inactive_activity();

using AttributeValue = std::variant<double, std::string, bool>;
using AttributeMap = std::map<std::string, AttributeValue>;

std::string_view kind_name(const AttributeValue& v);
std::string to_string(const AttributeValue& v);

struct DeviceObject {
  EntityId id;
  EntityId object_type;
  std::set<EntityId> groups;
  std::optional<EntityId> location;
  std::optional<EntityId> owner;
  AttributeMap attributes;

  bool operator==(const DeviceObject&) const = default;
};

enum class SubjectKind { User, Device, Event };

std::string_view to_string(SubjectKind k);

struct Subject {
  EntityId id;
  SubjectKind kind = SubjectKind::User;
  AttributeMap attributes;
  /// (relation-name, target) pairs, e.g. ("parent-of", Child).
  std::set<std::pair<std::string, EntityId>> relations;

  bool operator==(const Subject&) const = default;
};

enum class ActivityStatus { Active, Halted, Completed, Aborted };

std::string_view to_string(ActivityStatus s);

struct ActivityInstance {
  EntityId device;
  EntityId activity;
  EntityId initiator;
  Timestamp start_time = 0;
  ActivityStatus status = ActivityStatus::Active;
  std::optional<Timestamp> end_time;
  /// Subject that moved the instance out of the live set, when it was not
  /// the initiator finishing on its own.
  std::optional<EntityId> ended_by;
  /// Index of the rule that permitted the start; drives continuity checks.
  std::optional<std::size_t> origin_rule;

  bool live() const noexcept {
    return status == ActivityStatus::Active || status == ActivityStatus::Halted;
  }
  /// Who left the device in its post-instance state.
  const EntityId& attributed_source() const noexcept {
    return ended_by ? *ended_by : initiator;
  }

  bool operator==(const ActivityInstance&) const = default;
};

enum class CounterScope { PerSource, PerObject, SystemWide };

std::string_view to_string(CounterScope s);

struct CounterKey {
  CounterScope scope = CounterScope::SystemWide;
  EntityId activity;
  std::optional<EntityId> subject_or_object;

  auto operator<=>(const CounterKey&) const = default;
};

/// Patterns over devices and subjects. Requester/Target are placeholders for
/// the subject and object of the request under evaluation; they must be
/// resolved (see resolve_pattern) before matching.
struct Pattern {
  enum class Kind { Id, Type, Group, Any, Requester, Target };

  Kind kind = Kind::Any;
  EntityId name;

  static Pattern id(EntityId n) { return {Kind::Id, std::move(n)}; }
  static Pattern type(EntityId n) { return {Kind::Type, std::move(n)}; }
  static Pattern group(EntityId n) { return {Kind::Group, std::move(n)}; }
  static Pattern any() { return {Kind::Any, {}}; }
  static Pattern requester() { return {Kind::Requester, {}}; }
  static Pattern target() { return {Kind::Target, {}}; }

  bool is_placeholder() const noexcept {
    return kind == Kind::Requester || kind == Kind::Target;
  }

  auto operator<=>(const Pattern&) const = default;
};

std::string to_string(const Pattern& p);

/// Activity selector used by state queries.
struct ActivityRef {
  enum class Kind { Named, Any, Inactive };

  Kind kind = Kind::Named;
  EntityId name;

  static ActivityRef named(EntityId n) { return {Kind::Named, std::move(n)}; }
  static ActivityRef any() { return {Kind::Any, {}}; }
  static ActivityRef inactive() { return {Kind::Inactive, {}}; }

  bool operator==(const ActivityRef&) const = default;
};

std::string to_string(const ActivityRef& a);

enum class Phase { Pre, Current };

/// (subject, op, object, activity) at a point in simulated time.
struct Request {
  EntityId subject;
  EntityId op;
  EntityId object;
  EntityId activity;
  Timestamp time = 0;

  bool operator==(const Request&) const = default;
};

using LiveKey = std::pair<EntityId, EntityId>;  // (device, activity)

struct EcosystemState {
  Timestamp clock = 0;
  std::map<EntityId, DeviceObject> devices;
  std::map<EntityId, Subject> subjects;
  std::map<LiveKey, ActivityInstance> live;
  std::vector<ActivityInstance> history;
  AttributeMap environment;
  std::map<CounterKey, std::vector<Timestamp>> counters;

  const DeviceObject* find_device(const EntityId& id) const;
  const Subject* find_subject(const EntityId& id) const;
  const ActivityInstance* find_live(const EntityId& device,
                                    const EntityId& activity) const;

  bool operator==(const EcosystemState&) const = default;
};

enum class ModelErrorCode {
  UnknownDevice,
  AlreadyActive,
  NotActive,
  NotHalted,
  ClockRegression,
};

std::string_view to_string(ModelErrorCode c);

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ModelErrorCode code() const noexcept { return code_; }

 private:
  ModelErrorCode code_;
};

/// Builds a state holding the given declarations. The EVENT subject is
/// always present.
EcosystemState make_state(std::vector<DeviceObject> devices,
                          std::vector<Subject> subjects, AttributeMap env = {});

EcosystemState advance_clock(EcosystemState state, Timestamp to);

EcosystemState start_activity(EcosystemState state, const EntityId& device,
                              const EntityId& activity,
                              const EntityId& initiator,
                              std::optional<std::size_t> origin_rule = {});

/// `mode` must be Completed or Aborted.
EcosystemState stop_activity(EcosystemState state, const EntityId& device,
                             const EntityId& activity, ActivityStatus mode,
                             std::optional<EntityId> ended_by = {});

EcosystemState halt_activity(EcosystemState state, const EntityId& device,
                             const EntityId& activity);
EcosystemState resume_activity(EcosystemState state, const EntityId& device,
                               const EntityId& activity);

/// Matches `p` against a device. Placeholder patterns never match.
bool matches_device(const Pattern& p, const DeviceObject& device);
/// Matches `p` against a subject id. Type(t) matches the subject kind name
/// or, for device subjects, the device type; Group(g) matches device
/// subjects in group g. Unknown subjects only match Any and Id.
bool matches_subject(const Pattern& p, const EcosystemState& state,
                     const EntityId& subject);

/// Current phase returns active instances; past phase returns finished
/// instances, optionally restricted to end_time >= clock - window. The
/// Inactive selector (current phase) yields, per matching device without an
/// active instance, its most recent finished instance, or a placeholder
/// instance with activity `inactive` when the device has none (matched only
/// by an Any source pattern).
std::vector<ActivityInstance> query_state(const EcosystemState& state,
                                          Phase phase,
                                          const ActivityRef& activity,
                                          const Pattern& object,
                                          const Pattern& source,
                                          std::optional<Duration> window = {});

/// Activations recorded under `key` in the fixed window of length `window`
/// (anchored at t=0) that contains the current clock.
std::size_t count_in_window(const EcosystemState& state, const CounterKey& key,
                            Duration window);

}  // namespace acac

template <>
struct std::hash<acac::EntityId> {
  std::size_t operator()(const acac::EntityId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
