#include "acac/engine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace acac {

const EntityId& trigger_op() {
  static const EntityId op{"TRIGGER"};
  return op;
}

namespace {

class CommitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_exclusion(const RelationDecl& r) {
  return r.kind == RelationKind::Incompatible ||
         r.kind == RelationKind::Temporary ||
         r.kind == RelationKind::Conditional;
}

bool guard_is_exception(const RelationDecl& r) {
  return r.kind == RelationKind::Temporary ||
         r.kind == RelationKind::Conditional;
}

std::optional<EntityId> partner(const RelationDecl& r, const EntityId& act) {
  if (act == r.a) return r.b;
  if (act == r.b) return r.a;
  return std::nullopt;
}

// Evaluation errors make the relation apply.
bool relation_applies(const RelationDecl& r, const EcosystemState& s,
                      const Request& ctx) {
  if (!r.guard || guard_is_exception(r)) return true;
  EvalResult res = evaluate(*r.guard, s, ctx);
  return res.failed() || *res.value;
}

bool exception_granted(const RelationDecl& r, const EcosystemState& s,
                       const Request& ctx) {
  if (!guard_is_exception(r) || !r.guard) return false;
  return evaluate(*r.guard, s, ctx).holds();
}

// Another live active instance (or, with `history`, a finished one inside
// the window) co-occurs with (dev, act) under exclusion relation `r`.
bool exclusion_conflict(const EcosystemState& s, const RelationDecl& r,
                        const EntityId& dev, const EntityId& act,
                        const std::vector<ActivityInstance>* history) {
  auto other = partner(r, act);
  if (!other) return false;
  for (const auto& [key, y] : s.live) {
    if (y.status != ActivityStatus::Active) continue;
    if (y.device == dev && y.activity == act) continue;
    if (y.activity != *other) continue;
    if (scope_holds(r.scope, s, dev, y.device)) return true;
  }
  if (history && r.window) {
    for (const auto& y : *history) {
      if (y.activity != *other || !y.end_time) continue;
      if (*y.end_time < s.clock - *r.window) continue;
      if (scope_holds(r.scope, s, dev, y.device)) return true;
    }
  }
  return false;
}

bool active_in_scope(const EcosystemState& s, const EntityId& act,
                     const EntityId& dev, DeviceScope scope) {
  for (const auto& [key, y] : s.live) {
    if (y.status == ActivityStatus::Active && y.activity == act &&
        scope_holds(scope, s, dev, y.device)) {
      return true;
    }
  }
  return false;
}

struct RelationVerdict {
  DenyReason reason;
  std::string note;
};

std::string describe(const RelationDecl& r) {
  return std::string(to_string(r.kind)) + "(" + r.a.str() + ", " + r.b.str() +
         ")";
}

// Evaluates relations as if the requested activity were already active.
std::optional<RelationVerdict> check_relations(const EcosystemState& s,
                                               const PolicySet& policy,
                                               const Request& req) {
  const EntityId& dev = req.object;
  const EntityId& act = req.activity;

  for (const auto& r : policy.relations) {
    if (!is_exclusion(r) || !partner(r, act)) continue;
    if (!relation_applies(r, s, req) || exception_granted(r, s, req)) continue;
    if (exclusion_conflict(s, r, dev, act, &s.history)) {
      return RelationVerdict{DenyReason::RelationIncompatible, describe(r)};
    }
  }

  for (const auto& r : policy.relations) {
    if (r.kind != RelationKind::Ordered) continue;
    const auto& first = std::get<OrderedDetail>(r.detail).first;
    auto second = partner(r, first);
    if (!second || *second != act || first == act) continue;
    if (!relation_applies(r, s, req)) continue;
    bool done = std::any_of(
        s.history.begin(), s.history.end(), [&](const ActivityInstance& h) {
          return h.activity == first &&
                 h.status == ActivityStatus::Completed &&
                 scope_holds(r.scope, s, dev, h.device) &&
                 (!r.window || *h.end_time >= s.clock - *r.window);
        });
    if (!done) {
      return RelationVerdict{DenyReason::RelationOrdered, describe(r)};
    }
  }

  for (const auto& r : policy.relations) {
    bool needs_a = false;
    if (r.kind == RelationKind::Concurrent) {
      needs_a = std::get<ConcurrentDetail>(r.detail).must;
    } else if (r.kind == RelationKind::Dependence) {
      needs_a = std::get<DependenceDetail>(r.detail).mode ==
                DependenceMode::Requires;
    }
    if (!needs_a || act != r.b || r.a == r.b) continue;
    if (!relation_applies(r, s, req)) continue;
    if (!active_in_scope(s, r.a, dev, r.scope)) {
      return RelationVerdict{DenyReason::RelationDependence, describe(r)};
    }
  }

  for (const auto& r : policy.relations) {
    if (r.kind != RelationKind::Precedence) continue;
    const auto& winner = std::get<PrecedenceDetail>(r.detail).winner;
    auto loser = partner(r, winner);
    if (!loser || *loser != act || winner == act) continue;
    if (!relation_applies(r, s, req)) continue;
    if (active_in_scope(s, winner, dev, r.scope)) {
      return RelationVerdict{DenyReason::RelationPrecedence, describe(r)};
    }
  }
  return std::nullopt;
}

CounterKey counter_key(const UsageLimit& l, const Request& req) {
  switch (l.scope) {
    case CounterScope::PerSource:
      return {l.scope, l.activity, req.subject};
    case CounterScope::PerObject:
      return {l.scope, l.activity, req.object};
    case CounterScope::SystemWide:
      break;
  }
  return {CounterScope::SystemWide, l.activity, std::nullopt};
}

// Accumulates one state transition: the commit of a permitted request or
// the effects of an event, followed by the continuity sweep.
class Transition {
 public:
  Transition(const PolicySet& policy, EcosystemState s)
      : state(std::move(s)), policy_(policy) {}

  void start(const EntityId& dev, const EntityId& act,
             const EntityId& initiator, std::optional<std::size_t> rule) {
    state = start_activity(std::move(state), dev, act, initiator, rule);
    touched_.push_back({dev, act});
  }

  void stop(const LiveKey& key, ActivityStatus mode,
            std::optional<EntityId> by) {
    state = stop_activity(std::move(state), key.first, key.second, mode,
                          std::move(by));
    ended.push_back(state.history.back());
  }

  void execute(const ObligationAction& o, const Request& ctx) {
    Pattern p = resolve_pattern(o.object, ctx);
    std::vector<EntityId> targets;
    for (const auto& [id, d] : state.devices) {
      if (matches_device(p, d)) targets.push_back(id);
    }
    auto fail = [&](const std::string& why) {
      throw CommitFailure(std::string(to_string(o.kind)) + " " +
                          o.activity.str() + "(" + to_string(o.object) +
                          "): " + why);
    };
    if (o.kind == ObligationKind::Start) {
      if (targets.empty()) fail("no matching device");
      for (const auto& t : targets) start(t, o.activity, ctx.subject, {});
    } else {
      std::vector<LiveKey> keys;
      for (const auto& t : targets) {
        const ActivityInstance* i = state.find_live(t, o.activity);
        if (!i) continue;
        if (o.kind == ObligationKind::Halt &&
            i->status != ActivityStatus::Active) {
          continue;
        }
        if (o.kind == ObligationKind::Resume &&
            i->status != ActivityStatus::Halted) {
          continue;
        }
        keys.push_back({t, o.activity});
      }
      if (keys.empty()) fail("no matching live instance");
      for (const auto& k : keys) {
        switch (o.kind) {
          case ObligationKind::Stop:
            stop(k, ActivityStatus::Aborted, ctx.subject);
            break;
          case ObligationKind::Halt:
            state = halt_activity(std::move(state), k.first, k.second);
            break;
          case ObligationKind::Resume:
            state = resume_activity(std::move(state), k.first, k.second);
            touched_.push_back(k);
            break;
          case ObligationKind::Start:
            break;
        }
      }
    }
    executed.push_back(ObligationAction{o.kind, o.activity, p});
  }

  // Relation effects of everything started in this commit: precedence
  // preemption, concurrent-must and parallel dependence starts, conditional
  // actions.
  void propagate(const Request& ctx) {
    std::set<std::size_t> conditional_fired;
    for (std::size_t i = 0; i < touched_.size(); ++i) {
      const auto [dev, act] = touched_[i];
      const ActivityInstance* inst = state.find_live(dev, act);
      if (!inst || inst->status != ActivityStatus::Active) continue;

      for (std::size_t ri = 0; ri < policy_.relations.size(); ++ri) {
        const RelationDecl& r = policy_.relations[ri];
        switch (r.kind) {
          case RelationKind::Precedence: {
            const auto& pd = std::get<PrecedenceDetail>(r.detail);
            auto loser = partner(r, pd.winner);
            if (pd.winner != act || !loser || *loser == act) break;
            if (!relation_applies(r, state, ctx)) break;
            std::vector<LiveKey> victims;
            for (const auto& [key, y] : state.live) {
              if (y.status == ActivityStatus::Active && y.activity == *loser &&
                  scope_holds(r.scope, state, dev, y.device)) {
                victims.push_back(key);
              }
            }
            for (const auto& v : victims) {
              if (pd.effect == LoserEffect::Halt) {
                state = halt_activity(std::move(state), v.first, v.second);
                preempted.push_back({v.first, v.second, ActivityStatus::Halted});
              } else {
                stop(v, ActivityStatus::Aborted, ctx.subject);
                preempted.push_back(
                    {v.first, v.second, ActivityStatus::Aborted});
              }
            }
            break;
          }
          case RelationKind::Concurrent: {
            const auto& cd = std::get<ConcurrentDetail>(r.detail);
            if (!cd.must || r.a != act || r.a == r.b) break;
            if (!relation_applies(r, state, ctx)) break;
            if (active_in_scope(state, r.b, dev, r.scope)) break;
            EntityId target = cd.on.value_or(dev);
            if (!scope_holds(r.scope, state, dev, target)) {
              throw CommitFailure(describe(r) + ": " + target.str() +
                                  " is outside the relation scope");
            }
            start(target, r.b, ctx.subject, {});
            started.push_back({target, r.b});
            break;
          }
          case RelationKind::Dependence: {
            const auto& dd = std::get<DependenceDetail>(r.detail);
            if (dd.mode != DependenceMode::Parallel || r.a != act) break;
            if (!relation_applies(r, state, ctx)) break;
            EntityId target = dd.on.value_or(dev);
            if (state.find_live(target, r.b)) break;
            start(target, r.b, ctx.subject, {});
            started.push_back({target, r.b});
            break;
          }
          case RelationKind::Conditional: {
            if (!partner(r, act) || conditional_fired.contains(ri)) break;
            if (!exclusion_conflict(state, r, dev, act, &state.history)) break;
            if (!exception_granted(r, state, ctx)) break;
            conditional_fired.insert(ri);
            for (const auto& o : std::get<ConditionalDetail>(r.detail).actions) {
              execute(o, ctx);
            }
            break;
          }
          default:
            break;
        }
      }
    }
  }

  // Rejects commits that leave a started or resumed instance co-occurring
  // with an excluded partner. Window checks use the history before the
  // commit, except for the requested activity (checked upfront).
  void verify_exclusions(const Request& ctx, const EcosystemState& before) {
    for (std::size_t i = 0; i < touched_.size(); ++i) {
      const auto& [dev, act] = touched_[i];
      const ActivityInstance* inst = state.find_live(dev, act);
      if (!inst || inst->status != ActivityStatus::Active) continue;
      const bool requested = i == 0 && dev == ctx.object && act == ctx.activity;
      for (const auto& r : policy_.relations) {
        if (!is_exclusion(r) || !partner(r, act)) continue;
        if (!relation_applies(r, state, ctx) ||
            exception_granted(r, state, ctx)) {
          continue;
        }
        if (exclusion_conflict(state, r, dev, act,
                               requested ? nullptr : &before.history)) {
          throw CommitFailure(act.str() + " on " + dev.str() + " violates " +
                              describe(r));
        }
      }
    }
  }

  void sweep() {
    for (int round = 0; round < 10000; ++round) {
      if (fire_after_dependences()) continue;
      if (revoke_continuity()) continue;
      if (enforce_exclusions()) continue;
      if (enforce_requirements()) continue;
      if (enforce_precedence()) continue;
      if (resume_unblocked()) continue;
      return;
    }
    throw EngineError("continuity sweep did not settle");
  }

  EcosystemState state;
  std::vector<ActivityInstance> ended;
  std::vector<ObligationAction> executed;
  std::vector<Preemption> preempted;
  std::vector<LiveKey> revoked;
  std::vector<LiveKey> started;
  std::vector<LiveKey> resumed;

 private:
  Request context_of(const ActivityInstance& i) const {
    Request ctx{i.initiator, {}, i.device, i.activity, state.clock};
    if (i.origin_rule && *i.origin_rule < policy_.rules.size()) {
      ctx.op = policy_.rules[*i.origin_rule].op;
    }
    return ctx;
  }

  void revoke(const LiveKey& key) {
    stop(key, ActivityStatus::Aborted, event_subject());
    revoked.push_back(key);
  }

  bool fire_after_dependences() {
    bool changed = false;
    while (after_fired_ < ended.size()) {
      const ActivityInstance done = ended[after_fired_++];
      if (done.status != ActivityStatus::Completed) continue;
      for (const auto& r : policy_.relations) {
        if (r.kind != RelationKind::Dependence || r.a != done.activity) continue;
        const auto& dd = std::get<DependenceDetail>(r.detail);
        if (dd.mode != DependenceMode::After) continue;
        if (!relation_applies(r, state, context_of(done))) continue;
        EntityId target = dd.on.value_or(done.device);
        if (!state.find_device(target) || state.find_live(target, r.b)) continue;
        start(target, r.b, done.initiator, {});
        started.push_back({target, r.b});
        changed = true;
      }
    }
    return changed;
  }

  bool revoke_continuity() {
    for (const auto& [key, inst] : state.live) {
      if (inst.status != ActivityStatus::Active || !inst.origin_rule) continue;
      if (*inst.origin_rule >= policy_.rules.size()) continue;
      const ActivityRule& rule = policy_.rules[*inst.origin_rule];
      if (!rule.cur_continuous && !rule.when_continuous) continue;
      EcosystemState without = state;
      without.live.erase(key);
      const Request ctx = context_of(inst);
      bool ok = true;
      if (rule.cur_continuous && rule.cur) {
        ok = evaluate(*rule.cur, without, ctx).holds();
      }
      if (ok && rule.when_continuous && rule.when) {
        ok = evaluate(*rule.when, without, ctx).holds();
      }
      if (!ok) {
        revoke(LiveKey{key});
        return true;
      }
    }
    return false;
  }

  bool enforce_exclusions() {
    for (const auto& r : policy_.relations) {
      if (!is_exclusion(r)) continue;
      for (const auto& [kx, x] : state.live) {
        if (x.status != ActivityStatus::Active || x.activity != r.a) continue;
        for (const auto& [ky, y] : state.live) {
          if (kx == ky || y.status != ActivityStatus::Active ||
              y.activity != r.b) {
            continue;
          }
          if (!scope_holds(r.scope, state, x.device, y.device)) continue;
          const bool y_newer = y.start_time != x.start_time
                                   ? y.start_time > x.start_time
                                   : ky > kx;
          const ActivityInstance& newer = y_newer ? y : x;
          const Request ctx = context_of(newer);
          if (!relation_applies(r, state, ctx) ||
              exception_granted(r, state, ctx)) {
            continue;
          }
          revoke(LiveKey{y_newer ? ky : kx});
          return true;
        }
      }
    }
    return false;
  }

  bool enforce_requirements() {
    for (const auto& r : policy_.relations) {
      bool must = false;
      if (r.kind == RelationKind::Concurrent) {
        must = std::get<ConcurrentDetail>(r.detail).must;
      }
      bool requires_a =
          r.kind == RelationKind::Dependence &&
          std::get<DependenceDetail>(r.detail).mode == DependenceMode::Requires;
      if ((!must && !requires_a) || r.a == r.b) continue;
      for (const auto& [key, inst] : state.live) {
        if (inst.status != ActivityStatus::Active) continue;
        const EntityId* needed = nullptr;
        if (inst.activity == r.b) {
          needed = &r.a;
        } else if (must && inst.activity == r.a) {
          needed = &r.b;
        }
        if (!needed) continue;
        if (!relation_applies(r, state, context_of(inst))) continue;
        if (!active_in_scope(state, *needed, inst.device, r.scope)) {
          revoke(LiveKey{key});
          return true;
        }
      }
    }
    return false;
  }

  bool enforce_precedence() {
    for (const auto& r : policy_.relations) {
      if (r.kind != RelationKind::Precedence) continue;
      const auto& pd = std::get<PrecedenceDetail>(r.detail);
      auto loser = partner(r, pd.winner);
      if (!loser || *loser == pd.winner) continue;
      for (const auto& [key, inst] : state.live) {
        if (inst.status != ActivityStatus::Active || inst.activity != *loser) {
          continue;
        }
        if (!relation_applies(r, state, context_of(inst))) continue;
        if (!active_in_scope(state, pd.winner, inst.device, r.scope)) continue;
        LiveKey k = key;
        if (pd.effect == LoserEffect::Halt) {
          state = halt_activity(std::move(state), k.first, k.second);
          preempted.push_back({k.first, k.second, ActivityStatus::Halted});
        } else {
          revoke(k);
          preempted.push_back({k.first, k.second, ActivityStatus::Aborted});
        }
        return true;
      }
    }
    return false;
  }

  bool resume_unblocked() {
    for (const auto& [key, inst] : state.live) {
      if (inst.status != ActivityStatus::Halted) continue;
      bool blocker_ended = false;
      bool still_blocked = false;
      for (const auto& r : policy_.relations) {
        if (r.kind != RelationKind::Precedence) continue;
        const auto& pd = std::get<PrecedenceDetail>(r.detail);
        auto loser = partner(r, pd.winner);
        if (!loser || *loser != inst.activity || pd.winner == inst.activity) {
          continue;
        }
        if (active_in_scope(state, pd.winner, inst.device, r.scope)) {
          still_blocked = true;
        }
        if (!pd.resume_after) continue;
        for (const auto& e : ended) {
          if (e.activity == pd.winner &&
              scope_holds(r.scope, state, e.device, inst.device)) {
            blocker_ended = true;
          }
        }
      }
      if (!blocker_ended || still_blocked) continue;
      const Request ctx = context_of(inst);
      bool clash = std::any_of(
          policy_.relations.begin(), policy_.relations.end(),
          [&](const RelationDecl& r) {
            return is_exclusion(r) && partner(r, inst.activity) &&
                   relation_applies(r, state, ctx) &&
                   !exception_granted(r, state, ctx) &&
                   exclusion_conflict(state, r, inst.device, inst.activity,
                                      nullptr);
          });
      if (clash) continue;
      LiveKey k = key;
      state = resume_activity(std::move(state), k.first, k.second);
      resumed.push_back(k);
      return true;
    }
    return false;
  }

  const PolicySet& policy_;
  std::vector<LiveKey> touched_;
  std::size_t after_fired_ = 0;
};

}  // namespace

Outcome decide_and_commit(const EcosystemState& in, const PolicySet& policy,
                          const Request& req) {
  if (req.time < in.clock) {
    throw EngineError("request at " + std::to_string(req.time) +
                      " predates clock " + std::to_string(in.clock));
  }
  EcosystemState base = in;
  base.clock = req.time;
  Decision d;
  auto deny = [&](DenyReason r, std::string note) {
    d.permit = false;
    d.reason = r;
    d.note = std::move(note);
    return Outcome{std::move(base), std::move(d)};
  };

  std::optional<std::size_t> idx;
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    if (rule_matches(policy.rules[i], req, base)) {
      idx = i;
      break;
    }
  }
  if (!idx) return deny(DenyReason::NoMatchingRule, "default deny");
  d.matched_rule = idx;
  const ActivityRule& rule = policy.rules[*idx];

  if (rule.pre) {
    EvalResult r = evaluate(*rule.pre, base, req);
    if (!r.holds()) return deny(DenyReason::PreFailed, r.error);
  }
  if (rule.cur) {
    EvalResult r = evaluate(*rule.cur, base, req);
    if (!r.holds()) return deny(DenyReason::CurFailed, r.error);
  }
  if (rule.when) {
    EvalResult r = evaluate(*rule.when, base, req);
    if (!r.holds()) return deny(DenyReason::ContextFailed, r.error);
  }

  auto over_limit = [&](const UsageLimit& l) {
    return count_in_window(base, counter_key(l, req), l.window) >= l.max_count;
  };
  for (const auto& l : rule.limits) {
    if (over_limit(l)) {
      return deny(DenyReason::LimitExceeded, "limit on " + l.activity.str());
    }
  }
  for (const auto& l : policy.limits) {
    if (l.activity == req.activity && over_limit(l)) {
      return deny(DenyReason::LimitExceeded, "limit on " + l.activity.str());
    }
  }

  const bool starts = req.activity != inactive_activity();
  if (starts) {
    if (auto v = check_relations(base, policy, req)) {
      return deny(v->reason, v->note);
    }
  }

  Transition t(policy, base);
  try {
    if (starts) t.start(req.object, req.activity, req.subject, idx);
    for (const auto& o : rule.obligations) t.execute(o, req);
    t.propagate(req);
    t.verify_exclusions(req, base);
  } catch (const ModelError& e) {
    return deny(DenyReason::ObligationFailed, e.what());
  } catch (const CommitFailure& e) {
    return deny(DenyReason::ObligationFailed, e.what());
  }
  t.sweep();

  d.permit = true;
  d.executed_obligations = std::move(t.executed);
  d.preempted = std::move(t.preempted);
  d.revoked = std::move(t.revoked);
  d.started = std::move(t.started);
  d.resumed = std::move(t.resumed);
  return {std::move(t.state), std::move(d)};
}

EventOutcome apply_event(const EcosystemState& state, const PolicySet& policy,
                         Timestamp time, const ScenarioEvent& event) {
  if (const auto* req = std::get_if<RequestEvent>(&event)) {
    Outcome o = decide_and_commit(
        state, policy,
        Request{req->subject, req->op, req->object, req->activity, time});
    return {std::move(o.state), std::move(o.decision), {}, {}, {}, {}};
  }
  if (const auto* dev = std::get_if<DeviceEvent>(&event); dev && dev->start) {
    Outcome o = decide_and_commit(
        state, policy,
        Request{event_subject(), trigger_op(), dev->object, dev->activity,
                time});
    return {std::move(o.state), std::move(o.decision), {}, {}, {}, {}};
  }

  if (time < state.clock) {
    throw EngineError("event at " + std::to_string(time) +
                      " predates clock " + std::to_string(state.clock));
  }
  Transition t(policy, advance_clock(state, time));
  if (const auto* env = std::get_if<EnvEvent>(&event)) {
    t.state.environment[env->name] = env->value;
  } else {
    const auto& stop = std::get<DeviceEvent>(event);
    t.stop({stop.object, stop.activity}, ActivityStatus::Completed, {});
  }
  t.sweep();
  return {std::move(t.state), std::nullopt, std::move(t.revoked),
          std::move(t.resumed), std::move(t.started), std::move(t.preempted)};
}

namespace {

template <class T, class F>
void append_list(std::ostringstream& os, std::string_view label,
                 const std::vector<T>& items, F fmt) {
  if (items.empty()) return;
  os << ' ' << label << "=[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << ',';
    os << fmt(items[i]);
  }
  os << ']';
}

std::string key_text(const LiveKey& k) {
  return k.first.str() + "/" + k.second.str();
}

}  // namespace

std::string format_decision_line(const Request& request,
                                 const Decision& decision) {
  std::ostringstream os;
  os << request.time << ' ' << request.subject.str() << ' ' << request.op.str()
     << ' ' << request.object.str() << ' ' << request.activity.str() << " -> ";
  if (decision.permit) {
    os << "PERMIT";
  } else {
    os << "DENY(" << to_string(*decision.reason) << ')';
  }
  append_list(os, "obligations", decision.executed_obligations,
              [](const ObligationAction& o) {
                return std::string(to_string(o.kind)) + ":" +
                       o.activity.str() + "(" + to_string(o.object) + ")";
              });
  append_list(os, "preempted", decision.preempted, [](const Preemption& p) {
    return p.device.str() + "/" + p.activity.str() + ":" +
           std::string(to_string(p.effect));
  });
  append_list(os, "revoked", decision.revoked, key_text);
  append_list(os, "started", decision.started, key_text);
  append_list(os, "resumed", decision.resumed, key_text);
  return os.str();
}


std::string format_event_line(Timestamp time, const ScenarioEvent& event,
                              const EventOutcome& outcome) {
  if (const auto* req = std::get_if<RequestEvent>(&event)) {
    return format_decision_line(
        Request{req->subject, req->op, req->object, req->activity, time},
        *outcome.decision);
  }
  if (const auto* dev = std::get_if<DeviceEvent>(&event); dev && dev->start) {
    return format_decision_line(Request{event_subject(), trigger_op(),
                                        dev->object, dev->activity, time},
                                *outcome.decision);
  }
  std::ostringstream os;
  os << time << ' ';
  if (const auto* env = std::get_if<EnvEvent>(&event)) {
    os << "env " << env->name << '=' << to_string(env->value);
  } else {
    const auto& dev = std::get<DeviceEvent>(event);
    os << "event " << dev.object.str() << ' ' << dev.activity.str() << " stop";
  }
  append_list(os, "preempted", outcome.preempted, [](const Preemption& p) {
    return p.device.str() + "/" + p.activity.str() + ":" +
           std::string(to_string(p.effect));
  });
  append_list(os, "revoked", outcome.revoked, key_text);
  append_list(os, "started", outcome.started, key_text);
  append_list(os, "resumed", outcome.resumed, key_text);
  return os.str();
}

}  // namespace acac
