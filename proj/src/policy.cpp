#include "acac/policy.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace acac {

Expr Expr::leaf(Atom a) {
  Expr e;
  e.kind = Kind::Leaf;
  e.atom = std::move(a);
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.kind = Kind::Not;
  e.children.push_back(std::move(inner));
  return e;
}

Expr Expr::all(std::vector<Expr> es) {
  if (es.size() == 1) return std::move(es.front());
  Expr e;
  e.kind = Kind::And;
  e.children = std::move(es);
  return e;
}

Expr Expr::any(std::vector<Expr> es) {
  if (es.size() == 1) return std::move(es.front());
  Expr e;
  e.kind = Kind::Or;
  e.children = std::move(es);
  return e;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less:
      return "<";
    case CompareOp::Greater:
      return ">";
    case CompareOp::Equal:
      return "=";
    case CompareOp::NotEqual:
      return "!=";
  }
  return "?";
}

std::string_view to_string(ObligationKind k) {
  switch (k) {
    case ObligationKind::Start:
      return "start";
    case ObligationKind::Stop:
      return "stop";
    case ObligationKind::Halt:
      return "halt";
    case ObligationKind::Resume:
      return "resume";
  }
  return "?";
}

std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::Ordered:
      return "ordered";
    case RelationKind::Concurrent:
      return "concurrent";
    case RelationKind::Temporary:
      return "temporary";
    case RelationKind::Precedence:
      return "precedence";
    case RelationKind::Dependence:
      return "dependence";
    case RelationKind::Conditional:
      return "conditional";
    case RelationKind::Incompatible:
      return "incompatible";
  }
  return "?";
}

std::string_view to_string(DeviceScope s) {
  switch (s) {
    case DeviceScope::Same:
      return "same";
    case DeviceScope::Different:
      return "different";
    case DeviceScope::Any:
      return "any";
    case DeviceScope::SameLocation:
      return "same-location";
  }
  return "?";
}

std::string_view to_string(LoserEffect e) {
  return e == LoserEffect::Halt ? "halt" : "abort";
}

std::string_view to_string(DependenceMode m) {
  switch (m) {
    case DependenceMode::Requires:
      return "requires";
    case DependenceMode::Parallel:
      return "parallel";
    case DependenceMode::After:
      return "after";
  }
  return "?";
}

std::string_view to_string(ValidationErrorKind k) {
  switch (k) {
    case ValidationErrorKind::DanglingReference:
      return "DanglingReference";
    case ValidationErrorKind::DuplicateDeclaration:
      return "DuplicateDeclaration";
    case ValidationErrorKind::ConflictingRelations:
      return "ConflictingRelations";
    case ValidationErrorKind::ZeroWindow:
      return "ZeroWindow";
    case ValidationErrorKind::TypeError:
      return "TypeError";
    case ValidationErrorKind::InvalidCondition:
      return "InvalidCondition";
    case ValidationErrorKind::InvalidRule:
      return "InvalidRule";
    case ValidationErrorKind::InvalidRelation:
      return "InvalidRelation";
    case ValidationErrorKind::InvalidLimit:
      return "InvalidLimit";
  }
  return "?";
}

RelationDetail default_detail(RelationKind kind, const EntityId& a) {
  switch (kind) {
    case RelationKind::Ordered:
      return OrderedDetail{a};
    case RelationKind::Concurrent:
      return ConcurrentDetail{};
    case RelationKind::Precedence:
      return PrecedenceDetail{a, LoserEffect::Halt, true};
    case RelationKind::Dependence:
      return DependenceDetail{};
    case RelationKind::Conditional:
      return ConditionalDetail{};
    case RelationKind::Temporary:
    case RelationKind::Incompatible:
      return std::monostate{};
  }
  return std::monostate{};
}

EcosystemState initial_state(const PolicySet& policy) {
  AttributeMap env;
  for (const auto& [name, value] : policy.environment) env[name] = value;
  return make_state(policy.devices, policy.subjects, std::move(env));
}

RelationFlavor flavor_of(const RelationDecl& r) {
  switch (r.kind) {
    case RelationKind::Ordered:
      return RelationFlavor::Ordered;
    case RelationKind::Concurrent: {
      const auto* d = std::get_if<ConcurrentDetail>(&r.detail);
      return d && d->must ? RelationFlavor::ConcurrentMust
                          : RelationFlavor::ConcurrentMay;
    }
    case RelationKind::Temporary:
      return RelationFlavor::Temporary;
    case RelationKind::Precedence:
      return RelationFlavor::Precedence;
    case RelationKind::Dependence: {
      const auto* d = std::get_if<DependenceDetail>(&r.detail);
      if (!d || d->mode == DependenceMode::Requires) {
        return RelationFlavor::DependenceRequires;
      }
      return d->mode == DependenceMode::Parallel
                 ? RelationFlavor::DependenceParallel
                 : RelationFlavor::DependenceAfter;
    }
    case RelationKind::Conditional:
      return RelationFlavor::Conditional;
    case RelationKind::Incompatible:
      return RelationFlavor::Incompatible;
  }
  return RelationFlavor::Incompatible;
}

namespace {

std::string_view flavor_name(RelationFlavor f) {
  static constexpr std::array<std::string_view, kRelationFlavorCount> names{
      "ordered",        "concurrent-must",    "concurrent-may",
      "temporary",      "precedence",         "dependence-requires",
      "dependence-parallel", "dependence-after", "conditional",
      "incompatible"};
  return names[static_cast<std::size_t>(f)];
}

// Pairs whose constraints cannot both hold for the same activity pair.
constexpr std::array<std::pair<RelationFlavor, RelationFlavor>, 17>
    kConflicts{{
        {RelationFlavor::Incompatible, RelationFlavor::ConcurrentMust},
        {RelationFlavor::Incompatible, RelationFlavor::ConcurrentMay},
        {RelationFlavor::Incompatible, RelationFlavor::DependenceRequires},
        {RelationFlavor::Incompatible, RelationFlavor::DependenceParallel},
        {RelationFlavor::Incompatible, RelationFlavor::Temporary},
        {RelationFlavor::Incompatible, RelationFlavor::Conditional},
        {RelationFlavor::ConcurrentMust, RelationFlavor::Ordered},
        {RelationFlavor::ConcurrentMust, RelationFlavor::Precedence},
        {RelationFlavor::ConcurrentMust, RelationFlavor::Temporary},
        {RelationFlavor::ConcurrentMust, RelationFlavor::Conditional},
        {RelationFlavor::DependenceRequires, RelationFlavor::Ordered},
        {RelationFlavor::DependenceRequires, RelationFlavor::Precedence},
        {RelationFlavor::DependenceRequires, RelationFlavor::Temporary},
        {RelationFlavor::DependenceParallel, RelationFlavor::Ordered},
        {RelationFlavor::DependenceParallel, RelationFlavor::Precedence},
        {RelationFlavor::DependenceParallel, RelationFlavor::Temporary},
        {RelationFlavor::DependenceParallel, RelationFlavor::Conditional},
    }};

}  // namespace

bool flavors_conflict(RelationFlavor x, RelationFlavor y) {
  return std::any_of(kConflicts.begin(), kConflicts.end(), [&](auto p) {
    return (p.first == x && p.second == y) || (p.first == y && p.second == x);
  });
}

bool scope_holds(DeviceScope scope, const EcosystemState& state,
                 const EntityId& device_a, const EntityId& device_b) {
  switch (scope) {
    case DeviceScope::Same:
      return device_a == device_b;
    case DeviceScope::Different:
      return device_a != device_b;
    case DeviceScope::Any:
      return true;
    case DeviceScope::SameLocation: {
      const DeviceObject* a = state.find_device(device_a);
      const DeviceObject* b = state.find_device(device_b);
      return a && b && a->location && b->location &&
             *a->location == *b->location;
    }
  }
  return false;
}

Pattern resolve_pattern(const Pattern& p, const Request& request) {
  if (p.kind == Pattern::Kind::Requester) return Pattern::id(request.subject);
  if (p.kind == Pattern::Kind::Target) return Pattern::id(request.object);
  return p;
}

bool rule_matches(const ActivityRule& rule, const Request& request,
                  const EcosystemState& state) {
  if (rule.op != request.op || rule.activity != request.activity) return false;
  const DeviceObject* device = state.find_device(request.object);
  if (!device || !state.find_subject(request.subject)) return false;
  return matches_device(rule.object, *device) &&
         matches_subject(rule.source, state, request.subject);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct AtomEvaluator {
  const EcosystemState& state;
  const Request& request;

  EvalResult operator()(const StateCondition& c) const {
    auto found = query_state(state, c.phase, c.activity,
                             resolve_pattern(c.object, request),
                             resolve_pattern(c.source, request), c.window);
    return {found.empty() == c.negated, {}};
  }

  EvalResult operator()(const ValueComparison& c) const {
    auto it = state.environment.find(c.name);
    if (it == state.environment.end()) {
      return {std::nullopt, "undefined value " + c.name};
    }
    const AttributeValue& v = it->second;
    if (v.index() != c.literal.index()) {
      return {std::nullopt, "cannot compare " + std::string(kind_name(v)) +
                                " " + c.name + " with " +
                                std::string(kind_name(c.literal))};
    }
    if (std::holds_alternative<bool>(v) &&
        (c.op == CompareOp::Less || c.op == CompareOp::Greater)) {
      return {std::nullopt, "booleans are unordered (" + c.name + ")"};
    }
    switch (c.op) {
      case CompareOp::Less:
        return {v < c.literal, {}};
      case CompareOp::Greater:
        return {c.literal < v, {}};
      case CompareOp::Equal:
        return {v == c.literal, {}};
      case CompareOp::NotEqual:
        return {v != c.literal, {}};
    }
    return {std::nullopt, "bad operator"};
  }

  EvalResult operator()(const LocationTest& t) const {
    Pattern p = resolve_pattern(t.object, request);
    if (p.kind == Pattern::Kind::Id && !state.find_device(p.name)) {
      return {std::nullopt, "location of unknown device " + p.name.str()};
    }
    bool at = false;
    for (const auto& [id, d] : state.devices) {
      if (matches_device(p, d) && d.location == t.location) {
        at = true;
        break;
      }
    }
    return {at == t.equal, {}};
  }

  EvalResult operator()(const RelationTest& t) const {
    Pattern subj = resolve_pattern(t.subject, request);
    Pattern target = resolve_pattern(t.target, request);
    for (const auto& [id, s] : state.subjects) {
      if (!matches_subject(subj, state, id)) continue;
      for (const auto& [name, to] : s.relations) {
        if (name != t.relation) continue;
        bool hit = false;
        switch (target.kind) {
          case Pattern::Kind::Any:
            hit = true;
            break;
          case Pattern::Kind::Id:
            hit = target.name == to;
            break;
          default: {
            const DeviceObject* d = state.find_device(to);
            hit = d && matches_device(target, *d);
          }
        }
        if (hit) return {true, {}};
      }
    }
    return {false, {}};
  }

  EvalResult operator()(const TimeOfDayRange& r) const {
    Timestamp sod = state.clock % kSecondsPerDay;
    if (sod < 0) sod += kSecondsPerDay;
    bool in = r.from <= r.to ? (sod >= r.from && sod < r.to)
                             : (sod >= r.from || sod < r.to);
    return {in, {}};
  }

  EvalResult operator()(const RequesterTest& t) const {
    return {matches_subject(resolve_pattern(t.subject, request), state,
                            request.subject),
            {}};
  }
};

}  // namespace

EvalResult evaluate(const Expr& expr, const EcosystemState& state,
                    const Request& request) {
  switch (expr.kind) {
    case Expr::Kind::Leaf:
      return std::visit(AtomEvaluator{state, request}, *expr.atom);
    case Expr::Kind::Not: {
      EvalResult r = evaluate(expr.children.front(), state, request);
      if (r.value) r.value = !*r.value;
      return r;
    }
    case Expr::Kind::And:
      for (const auto& c : expr.children) {
        EvalResult r = evaluate(c, state, request);
        if (!r.holds()) return r;
      }
      return {true, {}};
    case Expr::Kind::Or:
      for (const auto& c : expr.children) {
        EvalResult r = evaluate(c, state, request);
        if (r.failed() || *r.value) return r;
      }
      return {false, {}};
  }
  return {std::nullopt, "malformed expression"};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

enum class Role { Device, Subject };

enum class Clause { Pre, Current, Guard };

class Validator {
 public:
  explicit Validator(const PolicySet& p) : policy_(p) {
    for (const auto& d : p.devices) {
      types_.insert(d.object_type);
      groups_.insert(d.groups.begin(), d.groups.end());
      device_ids_.insert(d.id);
    }
    for (const auto& s : p.subjects) subject_ids_.insert(s.id);
    subject_ids_.insert(event_subject());
    for (const auto& [name, value] : p.environment) env_.emplace(name, value);
  }

  std::vector<ValidationError> run() {
    check_declarations();
    for (const auto& l : policy_.limits) check_limit(l, "policy limit");
    for (const auto& r : policy_.rules) check_rule(r);
    for (const auto& r : policy_.relations) check_relation(r);
    check_conflicts();
    std::sort(errors_.begin(), errors_.end());
    return std::move(errors_);
  }

 private:
  void add(ValidationErrorKind k, std::string msg) {
    errors_.push_back({k, std::move(msg)});
  }

  void check_declarations() {
    std::set<EntityId> seen;
    for (const auto& d : policy_.devices) {
      if (!seen.insert(d.id).second) {
        add(ValidationErrorKind::DuplicateDeclaration,
            "device " + d.id.str() + " declared twice");
      }
      if (d.object_type.empty()) {
        add(ValidationErrorKind::DanglingReference,
            "device " + d.id.str() + " has no type");
      }
      if (d.owner && !subject_ids_.contains(*d.owner)) {
        add(ValidationErrorKind::DanglingReference,
            "device " + d.id.str() + " owner " + d.owner->str() +
                " is not a declared subject");
      }
    }
    seen.clear();
    for (const auto& s : policy_.subjects) {
      if (s.id == event_subject() || s.kind == SubjectKind::Event) {
        add(ValidationErrorKind::DuplicateDeclaration,
            "subject " + s.id.str() + ": EVENT is built in");
      }
      if (!seen.insert(s.id).second) {
        add(ValidationErrorKind::DuplicateDeclaration,
            "subject " + s.id.str() + " declared twice");
      }
      if (s.kind == SubjectKind::Device && !device_ids_.contains(s.id)) {
        add(ValidationErrorKind::DanglingReference,
            "device subject " + s.id.str() + " has no device declaration");
      }
      for (const auto& [name, target] : s.relations) {
        if (!subject_ids_.contains(target) && !device_ids_.contains(target)) {
          add(ValidationErrorKind::DanglingReference,
              "subject " + s.id.str() + " relation " + name + " -> " +
                  target.str() + " targets an undeclared entity");
        }
      }
    }
    std::set<std::string> names;
    for (const auto& [name, value] : policy_.environment) {
      if (!names.insert(name).second) {
        add(ValidationErrorKind::DuplicateDeclaration,
            "env " + name + " declared twice");
      }
    }
  }

  void check_pattern(const Pattern& p, Role role, bool placeholders,
                     const std::string& where) {
    if (p.is_placeholder()) {
      if (!placeholders) {
        add(ValidationErrorKind::InvalidRule,
            where + ": " + to_string(p) + " is only allowed in expressions");
      }
      return;
    }
    switch (p.kind) {
      case Pattern::Kind::Id: {
        const auto& ids = role == Role::Device ? device_ids_ : subject_ids_;
        if (!ids.contains(p.name)) {
          add(ValidationErrorKind::DanglingReference,
              where + ": undeclared " +
                  (role == Role::Device ? "device " : "subject ") +
                  p.name.str());
        }
        break;
      }
      case Pattern::Kind::Type: {
        bool kind_name_ok = role == Role::Subject &&
                            (p.name.str() == "user" ||
                             p.name.str() == "device" ||
                             p.name.str() == "event");
        if (!kind_name_ok && !types_.contains(p.name)) {
          add(ValidationErrorKind::DanglingReference,
              where + ": no device has type " + p.name.str());
        }
        break;
      }
      case Pattern::Kind::Group:
        if (!groups_.contains(p.name)) {
          add(ValidationErrorKind::DanglingReference,
              where + ": no device is in group " + p.name.str());
        }
        break;
      default:
        break;
    }
  }

  void check_window(std::optional<Duration> w, const std::string& where) {
    if (w && *w <= 0) {
      add(ValidationErrorKind::ZeroWindow, where + ": window must be positive");
    }
  }

  void check_expr(const Expr& e, Clause clause, const std::string& where) {
    switch (e.kind) {
      case Expr::Kind::Leaf:
        if (!e.atom) {
          add(ValidationErrorKind::InvalidCondition, where + ": empty atom");
          return;
        }
        std::visit([&](const auto& a) { check_atom(a, clause, where); },
                   *e.atom);
        return;
      case Expr::Kind::Not:
        if (e.children.size() != 1) {
          add(ValidationErrorKind::InvalidCondition,
              where + ": negation needs one operand");
        }
        break;
      case Expr::Kind::And:
      case Expr::Kind::Or:
        if (e.children.size() < 2) {
          add(ValidationErrorKind::InvalidCondition,
              where + ": connective needs two operands");
        }
        break;
    }
    for (const auto& c : e.children) check_expr(c, clause, where);
  }

  void check_atom(const StateCondition& c, Clause clause,
                  const std::string& where) {
    const Phase expected = clause == Clause::Pre ? Phase::Pre : Phase::Current;
    if (c.phase != expected) {
      add(ValidationErrorKind::InvalidCondition,
          where + ": state condition in the wrong block");
    }
    if (c.window && c.phase != Phase::Pre) {
      add(ValidationErrorKind::InvalidCondition,
          where + ": window only allowed on pre conditions");
    }
    if (c.phase == Phase::Pre && c.activity.kind == ActivityRef::Kind::Inactive) {
      add(ValidationErrorKind::InvalidCondition,
          where + ": inactive is only meaningful for current state");
    }
    check_window(c.window, where);
    check_pattern(c.object, Role::Device, true, where);
    check_pattern(c.source, Role::Subject, true, where);
  }

  void check_atom(const ValueComparison& c, Clause, const std::string& where) {
    auto it = env_.find(c.name);
    if (it == env_.end()) {
      add(ValidationErrorKind::DanglingReference,
          where + ": value(" + c.name + ") is not a declared env");
      return;
    }
    if (it->second.index() != c.literal.index()) {
      add(ValidationErrorKind::TypeError,
          where + ": value(" + c.name + ") is a " +
              std::string(kind_name(it->second)) + ", compared with a " +
              std::string(kind_name(c.literal)));
    } else if (std::holds_alternative<bool>(c.literal) &&
               (c.op == CompareOp::Less || c.op == CompareOp::Greater)) {
      add(ValidationErrorKind::TypeError,
          where + ": value(" + c.name + ") is boolean and has no order");
    }
  }

  void check_atom(const LocationTest& t, Clause, const std::string& where) {
    check_pattern(t.object, Role::Device, true, where);
  }

  void check_atom(const RelationTest& t, Clause, const std::string& where) {
    check_pattern(t.subject, Role::Subject, true, where);
    if (t.target.kind == Pattern::Kind::Id &&
        !device_ids_.contains(t.target.name) &&
        !subject_ids_.contains(t.target.name)) {
      add(ValidationErrorKind::DanglingReference,
          where + ": rel target " + t.target.name.str() + " is undeclared");
    } else if (t.target.kind != Pattern::Kind::Id) {
      check_pattern(t.target, Role::Device, true, where);
    }
  }

  void check_atom(const TimeOfDayRange& r, Clause, const std::string& where) {
    if (r.from < 0 || r.to < 0 || r.from > kSecondsPerDay ||
        r.to > kSecondsPerDay) {
      add(ValidationErrorKind::InvalidCondition,
          where + ": time_in bounds must lie within one day");
    }
  }

  void check_atom(const RequesterTest& t, Clause, const std::string& where) {
    check_pattern(t.subject, Role::Subject, false, where);
  }

  void check_obligation(const ObligationAction& o, const std::string& where) {
    if (o.activity == inactive_activity()) {
      add(ValidationErrorKind::InvalidRule,
          where + ": obligations must name a concrete activity");
    }
    check_pattern(o.object, Role::Device, true, where);
  }

  void check_limit(const UsageLimit& l, const std::string& where) {
    if (l.max_count == 0) {
      add(ValidationErrorKind::InvalidLimit,
          where + ": limit on " + l.activity.str() + " must allow at least 1");
    }
    if (l.window <= 0) {
      add(ValidationErrorKind::ZeroWindow,
          where + ": limit on " + l.activity.str() + " needs a positive window");
    }
  }

  void check_rule(const ActivityRule& r) {
    const std::string where = "rule on " + to_string(r.object) + ": allow " +
                              r.op.str() + " by " + to_string(r.source) +
                              " as " + r.activity.str();
    if (r.op.empty() || r.activity.empty()) {
      add(ValidationErrorKind::InvalidRule, where + ": incomplete head");
    }
    check_pattern(r.object, Role::Device, false, where);
    check_pattern(r.source, Role::Subject, false, where);
    if (r.activity == inactive_activity()) {
      bool stops = std::any_of(
          r.obligations.begin(), r.obligations.end(),
          [](const ObligationAction& o) {
            return o.kind == ObligationKind::Stop;
          });
      if (!stops) {
        add(ValidationErrorKind::InvalidRule,
            where + ": an inactive rule must stop a named activity");
      }
    }
    if (r.pre) check_expr(*r.pre, Clause::Pre, where);
    if (r.cur) check_expr(*r.cur, Clause::Current, where);
    if (r.when) check_expr(*r.when, Clause::Current, where);
    if (r.cur_continuous && !r.cur) {
      add(ValidationErrorKind::InvalidRule, where + ": cur* without condition");
    }
    if (r.when_continuous && !r.when) {
      add(ValidationErrorKind::InvalidRule,
          where + ": when* without condition");
    }
    for (const auto& o : r.obligations) check_obligation(o, where);
    for (const auto& l : r.limits) check_limit(l, where);
  }

  void check_relation(const RelationDecl& r) {
    const std::string where = "relation " + std::string(to_string(r.kind)) +
                              " " + r.a.str() + " " + r.b.str();
    if (r.a.empty() || r.b.empty()) {
      add(ValidationErrorKind::InvalidRelation, where + ": missing activity");
      return;
    }
    if (r.a == inactive_activity() || r.b == inactive_activity()) {
      add(ValidationErrorKind::InvalidRelation,
          where + ": relations name concrete activities");
    }
    if (r.a == r.b && !(r.kind == RelationKind::Incompatible &&
                        r.scope == DeviceScope::Different)) {
      add(ValidationErrorKind::InvalidRelation,
          where + ": an activity can only exclude itself across devices");
    }
    check_window(r.window, where);
    if (r.guard) check_expr(*r.guard, Clause::Guard, where);

    auto check_on = [&](const std::optional<EntityId>& on) {
      if (on && !device_ids_.contains(*on)) {
        add(ValidationErrorKind::DanglingReference,
            where + ": undeclared device " + on->str());
      }
    };
    bool shape_ok = true;
    switch (r.kind) {
      case RelationKind::Incompatible:
      case RelationKind::Temporary:
        shape_ok = std::holds_alternative<std::monostate>(r.detail);
        break;
      case RelationKind::Ordered:
        if (const auto* d = std::get_if<OrderedDetail>(&r.detail)) {
          if (d->first != r.a && d->first != r.b) {
            add(ValidationErrorKind::InvalidRelation,
                where + ": first must be one of the pair");
          }
        } else {
          shape_ok = false;
        }
        break;
      case RelationKind::Concurrent:
        if (const auto* d = std::get_if<ConcurrentDetail>(&r.detail)) {
          check_on(d->on);
        } else {
          shape_ok = false;
        }
        break;
      case RelationKind::Precedence:
        if (const auto* d = std::get_if<PrecedenceDetail>(&r.detail)) {
          if (d->winner != r.a && d->winner != r.b) {
            add(ValidationErrorKind::InvalidRelation,
                where + ": winner must be one of the pair");
          }
        } else {
          shape_ok = false;
        }
        break;
      case RelationKind::Dependence:
        if (const auto* d = std::get_if<DependenceDetail>(&r.detail)) {
          check_on(d->on);
        } else {
          shape_ok = false;
        }
        break;
      case RelationKind::Conditional:
        if (const auto* d = std::get_if<ConditionalDetail>(&r.detail)) {
          for (const auto& o : d->actions) check_obligation(o, where);
        } else {
          shape_ok = false;
        }
        break;
    }
    if (!shape_ok) {
      add(ValidationErrorKind::InvalidRelation,
          where + ": detail does not fit the relation kind");
    }
  }

  void check_conflicts() {
    const auto& rs = policy_.relations;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = i + 1; j < rs.size(); ++j) {
        auto pair_i = std::minmax(rs[i].a, rs[i].b);
        auto pair_j = std::minmax(rs[j].a, rs[j].b);
        if (pair_i != pair_j || rs[i].scope != rs[j].scope) continue;
        auto fi = flavor_of(rs[i]);
        auto fj = flavor_of(rs[j]);
        if (!flavors_conflict(fi, fj)) continue;
        auto names = std::minmax(flavor_name(fi), flavor_name(fj));
        add(ValidationErrorKind::ConflictingRelations,
            "(" + pair_i.first.str() + ", " + pair_i.second.str() +
                ") scope=" + std::string(to_string(rs[i].scope)) +
                " declared both " + std::string(names.first) + " and " +
                std::string(names.second));
      }
    }
  }

  const PolicySet& policy_;
  std::set<EntityId> types_;
  std::set<EntityId> groups_;
  std::set<EntityId> device_ids_;
  std::set<EntityId> subject_ids_;
  std::map<std::string, AttributeValue> env_;
  std::vector<ValidationError> errors_;
};

}  // namespace

std::vector<ValidationError> validate(const PolicySet& policy) {
  return Validator(policy).run();
}

}  // namespace acac
