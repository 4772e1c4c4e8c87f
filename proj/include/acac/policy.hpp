#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acac/core_model.hpp"

namespace acac {

/// State atom `[!]activity(object, source) [within d]`.
struct StateCondition {
  Phase phase = Phase::Current;
  bool negated = false;
  ActivityRef activity;
  Pattern object;
  Pattern source;
  std::optional<Duration> window;

  bool operator==(const StateCondition&) const = default;
};

enum class CompareOp { Less, Greater, Equal, NotEqual };

std::string_view to_string(CompareOp op);

/// `value(name) op literal`, read from the environment.
struct ValueComparison {
  std::string name;
  CompareOp op = CompareOp::Equal;
  AttributeValue literal;

  bool operator==(const ValueComparison&) const = default;
};

/// `location(object) = loc` or `location(object) != loc`. With several
/// matching devices, `=` holds if any of them is at `loc`; `!=` is its
/// negation.
struct LocationTest {
  Pattern object;
  bool equal = true;
  EntityId location;

  bool operator==(const LocationTest&) const = default;
};

/// `rel(name, subject, target)`: some subject matching `subject` carries the
/// relation `name` to an entity matching `target`.
struct RelationTest {
  std::string relation;
  Pattern subject;
  Pattern target;

  bool operator==(const RelationTest&) const = default;
};

/// `time_in(from, to)` over seconds-of-day of the simulated clock; the range
/// is half-open and wraps past midnight when from > to.
struct TimeOfDayRange {
  Duration from = 0;
  Duration to = 0;

  bool operator==(const TimeOfDayRange&) const = default;
};

/// `requester(pattern)`: the requesting subject matches.
struct RequesterTest {
  Pattern subject;

  bool operator==(const RequesterTest&) const = default;
};

using Atom = std::variant<StateCondition, ValueComparison, LocationTest,
                          RelationTest, TimeOfDayRange, RequesterTest>;

/// Boolean tree over atoms. Not has one child; And/Or have two or more.
struct Expr {
  enum class Kind { Leaf, Not, And, Or };

  Kind kind = Kind::Leaf;
  std::optional<Atom> atom;
  std::vector<Expr> children;

  static Expr leaf(Atom a);
  static Expr negate(Expr e);
  static Expr all(std::vector<Expr> es);
  static Expr any(std::vector<Expr> es);

  bool operator==(const Expr&) const = default;
};

struct UsageLimit {
  CounterScope scope = CounterScope::SystemWide;
  EntityId activity;
  std::size_t max_count = 1;
  Duration window = kSecondsPerDay;

  bool operator==(const UsageLimit&) const = default;
};

enum class ObligationKind { Start, Stop, Halt, Resume };

std::string_view to_string(ObligationKind k);

/// Executed on commit, attributed to the requesting subject.
struct ObligationAction {
  ObligationKind kind = ObligationKind::Start;
  EntityId activity;
  Pattern object;

  bool operator==(const ObligationAction&) const = default;
};

struct ActivityRule {
  Pattern object;
  EntityId op;
  Pattern source;
  /// `inactive` means the request starts nothing; the rule's stop
  /// obligations carry its effect.
  EntityId activity;
  std::optional<Expr> pre;
  std::optional<Expr> cur;
  bool cur_continuous = false;
  std::vector<ObligationAction> obligations;
  std::optional<Expr> when;
  bool when_continuous = false;
  std::vector<UsageLimit> limits;

  bool operator==(const ActivityRule&) const = default;
};

enum class RelationKind {
  Ordered,
  Concurrent,
  Temporary,
  Precedence,
  Dependence,
  Conditional,
  Incompatible,
};

enum class DeviceScope { Same, Different, Any, SameLocation };

enum class LoserEffect { Halt, Abort };

enum class DependenceMode { Requires, Parallel, After };

std::string_view to_string(RelationKind k);
std::string_view to_string(DeviceScope s);
std::string_view to_string(LoserEffect e);
std::string_view to_string(DependenceMode m);

struct OrderedDetail {
  EntityId first;
  bool operator==(const OrderedDetail&) const = default;
};

/// `must`: starting `a` also starts `b` (on `on`, or the same device), and
/// `b` cannot start without `a`. `may` places no constraint.
struct ConcurrentDetail {
  bool must = false;
  std::optional<EntityId> on;
  bool operator==(const ConcurrentDetail&) const = default;
};

struct PrecedenceDetail {
  EntityId winner;
  LoserEffect effect = LoserEffect::Halt;
  bool resume_after = true;
  bool operator==(const PrecedenceDetail&) const = default;
};

/// `a` is the prerequisite/trigger, `b` the dependent.
struct DependenceDetail {
  DependenceMode mode = DependenceMode::Requires;
  std::optional<EntityId> on;
  bool operator==(const DependenceDetail&) const = default;
};

struct ConditionalDetail {
  std::vector<ObligationAction> actions;
  bool operator==(const ConditionalDetail&) const = default;
};

using RelationDetail =
    std::variant<std::monostate, OrderedDetail, ConcurrentDetail,
                 PrecedenceDetail, DependenceDetail, ConditionalDetail>;

/// Guard semantics: for temporary and conditional the guard is the
/// exception that permits co-occurrence; for every other kind the relation
/// applies only while the guard holds.
struct RelationDecl {
  RelationKind kind = RelationKind::Incompatible;
  EntityId a;
  EntityId b;
  DeviceScope scope = DeviceScope::Any;
  std::optional<Duration> window;
  std::optional<Expr> guard;
  RelationDetail detail;

  bool operator==(const RelationDecl&) const = default;
};

/// Default detail for a relation kind when none is written.
RelationDetail default_detail(RelationKind kind, const EntityId& a);

struct PolicySet {
  std::vector<DeviceObject> devices;
  std::vector<Subject> subjects;
  std::vector<std::pair<std::string, AttributeValue>> environment;
  std::vector<UsageLimit> limits;
  std::vector<ActivityRule> rules;
  std::vector<RelationDecl> relations;

  bool operator==(const PolicySet&) const = default;
};

EcosystemState initial_state(const PolicySet& policy);

enum class ValidationErrorKind {
  DanglingReference,
  DuplicateDeclaration,
  ConflictingRelations,
  ZeroWindow,
  TypeError,
  InvalidCondition,
  InvalidRule,
  InvalidRelation,
  InvalidLimit,
};

std::string_view to_string(ValidationErrorKind k);

struct ValidationError {
  ValidationErrorKind kind;
  std::string message;

  auto operator<=>(const ValidationError&) const = default;
};

std::vector<ValidationError> validate(const PolicySet& policy);

/// Relation flavours used by the conflict matrix.
enum class RelationFlavor {
  Ordered,
  ConcurrentMust,
  ConcurrentMay,
  Temporary,
  Precedence,
  DependenceRequires,
  DependenceParallel,
  DependenceAfter,
  Conditional,
  Incompatible,
};

inline constexpr std::size_t kRelationFlavorCount = 10;

RelationFlavor flavor_of(const RelationDecl& r);
/// Whether two relations on the same (unordered pair, scope) contradict.
bool flavors_conflict(RelationFlavor x, RelationFlavor y);

bool scope_holds(DeviceScope scope, const EcosystemState& state,
                 const EntityId& device_a, const EntityId& device_b);

/// Replaces Requester/Target placeholders with the request's subject/object.
Pattern resolve_pattern(const Pattern& p, const Request& request);

bool rule_matches(const ActivityRule& rule, const Request& request,
                  const EcosystemState& state);

struct EvalResult {
  std::optional<bool> value;
  std::string error;

  bool holds() const noexcept { return value.value_or(false); }
  bool failed() const noexcept { return !value.has_value(); }
};

/// Evaluates an expression with no side effects. Evaluation is left to
/// right with short-circuiting; an error aborts the whole expression.
EvalResult evaluate(const Expr& expr, const EcosystemState& state,
                    const Request& request);

}  // namespace acac
