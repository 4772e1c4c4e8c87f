// Acceptance checks 1-8. Prints one line per criterion and exits non-zero
// if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "acac/analyzer.hpp"
#include "acac/dsl.hpp"
#include "acac/engine.hpp"
#include "acac/simulator.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace acac;
using namespace acac::literals;
using namespace acac::testing;

namespace {

using SteadyClock = std::chrono::steady_clock;

// Time budgets in seconds.
constexpr double kCorpusBudget = 1.0;
constexpr double kIncompatibleBudget = 30.0;
constexpr double kAnalyzerBudget = 60.0;

constexpr std::size_t kIncompatibleScenarios = 1000;
constexpr std::size_t kEventsPerScenario = 40;
constexpr std::size_t kLimitStreams = 300;
constexpr std::size_t kRequestsPerStream = 150;
constexpr std::size_t kAnalyzerPolicies = 1500;
constexpr std::size_t kMaxUniverse = 8;
constexpr std::size_t kRandomAsts = 500;
constexpr std::size_t kMutations = 3000;
constexpr std::size_t kDenyFuzz = 2000;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

bool is_request(const TraceEntry& e) {
  return std::holds_alternative<RequestEvent>(e.event.event);
}

std::string decision_letters(const ScenarioTrace& trace) {
  std::string out;
  for (const auto& e : trace.entries) {
    if (is_request(e)) out += e.decision->permit ? 'P' : 'D';
  }
  return out;
}

Scenario prefix(const Scenario& sc, std::size_t n) {
  Scenario out;
  out.events.assign(sc.events.begin(), sc.events.begin() + n);
  for (const auto& [i, e] : sc.expectations) {
    if (i < n) out.expectations[i] = e;
  }
  return out;
}

// ---------------------------------------------------------------------------

Check corpus_replay() {
  // Permit/deny sequence of the requests in each example, from the prose.
  const std::map<std::string, std::string> expected{
      {"ex01", "DPDPPPD"}, {"ex02", "DPDPPDDP"}, {"ex03", "DPDPP"},
      {"ex04", "DPDPDPP"}, {"ex05", "DPDP"},     {"ex06", "DDDP"},
      {"ex07", "DPDPPP"},  {"ex08", "PDDP"},     {"ex09", "PPDPDPPP"},
      {"ex10", "PDPPDD"},  {"ex11", "PPPDPPP"},  {"ex11_den", "PP"},
      {"ex12", "PPDDPDPP"},
  };
  Check c;
  const auto t0 = SteadyClock::now();
  std::size_t requests = 0;
  std::map<std::string, ScenarioTrace> traces;
  for (const auto& pair : example_pairs()) {
    // "examples/<name>.acsc"
    const std::string name = pair.scenario.substr(9, pair.scenario.size() - 14);
    const PolicySet policy = load_policy(pair.policy);
    const Scenario sc = load_scenario(pair.scenario);
    const RunResult r = run(policy, sc);
    if (!r.ok()) {
      c.fail(name + ": " + r.failure->to_string());
      continue;
    }
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
      if (std::holds_alternative<RequestEvent>(sc.events[i].event) &&
          !sc.expectations.contains(i)) {
        c.fail(name + ": request " + std::to_string(i) + " has no expectation");
      }
    }
    const std::string got = decision_letters(r.trace);
    auto it = expected.find(name);
    if (it == expected.end()) {
      c.fail("unexpected example " + name);
    } else if (got != it->second) {
      c.fail(name + ": got " + got + ", want " + it->second);
    }
    requests += got.size();
    traces[name] = r.trace;
  }
  const double elapsed = seconds_since(t0);
  if (traces.size() != expected.size()) c.fail("missing examples");

  // Example 3: the imaging permit stops the detector's spraying.
  if (auto it = traces.find("ex03"); it != traces.end()) {
    const auto& last = it->second.entries.back();
    bool stop_done = false;
    for (const auto& o : last.decision->executed_obligations) {
      stop_done |= o.kind == ObligationKind::Stop && o.activity == "Spraying"_id;
    }
    if (!stop_done) c.fail("ex03: no stop-Spraying obligation");
    bool attributed = false;
    for (const auto& h : it->second.final_state.history) {
      attributed |= h.activity == "Spraying"_id && h.initiator == "weed-detector"_id &&
                    h.attributed_source() == "autonomous-tractor"_id;
    }
    if (!attributed) c.fail("ex03: spraying not ended by autonomous-tractor");
  }
  // Example 7: opening the outlet valve revokes pumping.
  if (auto it = traces.find("ex07"); it != traces.end()) {
    if (it->second.entries.back().decision->revoked.empty()) {
      c.fail("ex07: pumping not revoked");
    }
  }
  if (elapsed >= kCorpusBudget) c.fail("runtime " + fmt_seconds(elapsed));
  if (c.ok) {
    c.detail = std::to_string(traces.size()) + " scenarios, " +
               std::to_string(requests) + " requests, " + fmt_seconds(elapsed) +
               " < " + fmt_seconds(kCorpusBudget);
  }
  return c;
}

// ---------------------------------------------------------------------------

Check relation_suite() {
  Check c;
  const std::vector<std::string> kinds{"ordered",    "concurrent", "temporary",
                                       "precedence", "dependence", "conditional",
                                       "incompatible"};
  std::size_t scenarios = 0;
  for (const auto& kind : kinds) {
    const PolicySet policy = load_policy("relations/" + kind + ".acac");
    for (const std::string variant : {"permit", "deny"}) {
      const Scenario sc = load_scenario("relations/" + kind + "_" + variant + ".acsc");
      const RunResult r = run(policy, sc);
      ++scenarios;
      if (!r.ok()) {
        c.fail(kind + "_" + variant + ": " + r.failure->to_string());
        continue;
      }
      // Deny paths must be refused by a relation, not by the rules.
      bool seen = false;
      for (const auto& e : r.trace.entries) {
        if (!is_request(e)) continue;
        const Decision& d = *e.decision;
        if (variant == "permit") {
          seen |= d.permit;
        } else {
          seen |= !d.permit && d.reason >= DenyReason::RelationIncompatible &&
                  d.reason <= DenyReason::RelationPrecedence;
        }
      }
      if (!seen) c.fail(kind + "_" + variant + ": no " + variant + " path");
    }
  }

  // Window boundary. Water spraying on field-1 ends at 1000 and the window
  // is 2h, so pest spraying there is denied up to 8200 inclusive.
  const PolicySet inc = load_policy("relations/incompatible.acac");
  {
    const RunResult r = run(inc, load_scenario("relations/incompatible_window.acsc"));
    ++scenarios;
    if (!r.ok()) c.fail("incompatible_window: " + r.failure->to_string());
  }
  EcosystemState s = initial_state(inc);
  s = decide_and_commit(s, inc, {"worker"_id, "TURN-ON"_id, "Sprinkler"_id,
                                 "WaterSpraying"_id, 0})
          .state;
  s = stop_activity(advance_clock(s, 1000), "Sprinkler"_id, "WaterSpraying"_id,
                    ActivityStatus::Completed);
  std::size_t probes = 0;
  for (Timestamp t = 1000; t <= 9000; ++t, ++probes) {
    const Decision d = decide_and_commit(s, inc, {"farm-manager"_id, "SPRAY"_id,
                                                  "Drone"_id, "PestSpraying"_id, t})
                           .decision;
    const bool want_permit = t - 1000 > 7200;
    if (d.permit != want_permit) {
      c.fail("window probe at t=" + std::to_string(t));
      break;
    }
    if (!d.permit && d.reason != DenyReason::RelationIncompatible) {
      c.fail("window probe reason at t=" + std::to_string(t));
      break;
    }
  }

  // Precedence: mixing halts the two field-a actuators, which resume when
  // mixing stops; field-b is untouched.
  const PolicySet prec = load_policy("relations/precedence.acac");
  const Scenario ps = load_scenario("relations/precedence_permit.acsc");
  auto status_of = [](const EcosystemState& st, const char* dev) {
    const ActivityInstance* i = st.find_live(EntityId(dev), "NutrientSpraying"_id);
    return i ? std::string(to_string(i->status)) : std::string("none");
  };
  const RunResult during = run(prec, prefix(ps, 4));
  const RunResult after = run(prec, ps);
  const std::string mid = status_of(during.trace.final_state, "Actuator-1") + "," +
                          status_of(during.trace.final_state, "Actuator-2") + "," +
                          status_of(during.trace.final_state, "Actuator-3");
  const std::string end = status_of(after.trace.final_state, "Actuator-1") + "," +
                          status_of(after.trace.final_state, "Actuator-2") + "," +
                          status_of(after.trace.final_state, "Actuator-3");
  if (mid != "halted,halted,active") c.fail("precedence during mixing: " + mid);
  if (end != "active,active,active") c.fail("precedence after mixing: " + end);

  if (c.ok) {
    c.detail = "7 kinds, " + std::to_string(scenarios) + " scenarios, " +
               std::to_string(probes) +
               " window probes (deny at 8199, permit at 8201), precedence halt/resume";
  }
  return c;
}

// ---------------------------------------------------------------------------

Check incompatible_property() {
  Check c;
  const auto t0 = SteadyClock::now();
  Rng rng(0xAC3);
  SmallPolicyConfig cfg;
  cfg.require_incompatible = true;
  std::size_t transitions = 0;
  std::size_t permits = 0;
  std::size_t relation_denials = 0;
  for (std::size_t n = 0; n < kIncompatibleScenarios && c.ok; ++n) {
    const PolicySet policy = random_small_policy(rng, cfg);
    EcosystemState state = initial_state(policy);
    for (std::size_t k = 0; k < kEventsPerScenario; ++k) {
      const TimedEvent ev = next_random_event(rng, policy, state);
      EventOutcome o = apply_event(state, policy, ev.time, ev.event);
      state = std::move(o.state);
      ++transitions;
      if (o.decision) {
        permits += o.decision->permit;
        relation_denials += o.decision->reason == DenyReason::RelationIncompatible;
      }
      if (auto breach = incompatible_breach(state, policy)) {
        c.fail("scenario " + std::to_string(n) + " event " + std::to_string(k) +
               ": " + *breach + "\n" + pretty_print(policy));
        break;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= kIncompatibleBudget) c.fail("runtime " + fmt_seconds(elapsed));
  if (c.ok && relation_denials == 0) c.fail("no request was ever denied by a relation");
  if (c.ok) {
    c.detail = std::to_string(kIncompatibleScenarios) + " scenarios, " +
               std::to_string(transitions) + " transitions, " +
               std::to_string(permits) + " permits, " +
               std::to_string(relation_denials) + " relation denials, 0 breaches, " +
               fmt_seconds(elapsed) + " < " + fmt_seconds(kIncompatibleBudget);
  }
  return c;
}

// ---------------------------------------------------------------------------

Check limit_property() {
  Check c;
  Rng rng(0xAC4);
  const std::vector<Timestamp> steps{0, 0, 1, 60, 600, 1800, 3599, 3600, 7200, 43200};
  std::size_t decisions = 0;
  std::size_t limit_denials = 0;
  std::size_t permits = 0;
  for (std::size_t n = 0; n < kLimitStreams && c.ok; ++n) {
    const PolicySet policy = random_limit_policy(rng);
    LimitOracle oracle(policy);
    EcosystemState state = initial_state(policy);
    Timestamp t = 0;
    for (std::size_t k = 0; k < kRequestsPerStream; ++k) {
      t += pick(rng, steps);
      const Request req{EntityId("u" + std::to_string(uniform(rng, 0, 2))), "ON"_id,
                        EntityId("D" + std::to_string(uniform(rng, 0, 2))),
                        EntityId(chance(rng, 0.5) ? "A" : "B"), t};
      const bool allowed = oracle.allows(req);
      Outcome o = decide_and_commit(state, policy, req);
      ++decisions;
      const bool limited = o.decision.reason == DenyReason::LimitExceeded;
      if (o.decision.permit != allowed || limited == allowed) {
        c.fail("stream " + std::to_string(n) + " request " + std::to_string(k) +
               ": engine " + (o.decision.permit ? "permit" : "deny") +
               ", oracle " + (allowed ? "permit" : "deny"));
        break;
      }
      limit_denials += limited;
      state = std::move(o.state);
      if (o.decision.permit) {
        ++permits;
        oracle.record(req);
        state = apply_event(state, policy, t, DeviceEvent{req.object, req.activity, false})
                    .state;
      }
    }
    // Permits per fixed window, per limit and counter key.
    std::vector<UsageLimit> limits = policy.limits;
    for (const auto& r : policy.rules) {
      limits.insert(limits.end(), r.limits.begin(), r.limits.end());
    }
    for (const auto& l : limits) {
      std::map<std::pair<std::string, Timestamp>, std::size_t> buckets;
      for (const auto& p : oracle.permitted()) {
        if (p.activity != l.activity) continue;
        std::string key = l.scope == CounterScope::PerSource   ? p.subject.str()
                          : l.scope == CounterScope::PerObject ? p.object.str()
                                                               : std::string();
        if (++buckets[{key, p.time / l.window}] > l.max_count) {
          c.fail("stream " + std::to_string(n) + ": window over max for " +
                 l.activity.str());
        }
      }
    }
  }
  if (c.ok && limit_denials == 0) c.fail("no limit denial was ever exercised");
  if (c.ok) {
    c.detail = std::to_string(kLimitStreams) + " streams, " + std::to_string(decisions) +
               " decisions agree with counter replay (" + std::to_string(permits) +
               " permits, " + std::to_string(limit_denials) +
               " limit denials), no window over max";
  }
  return c;
}

// ---------------------------------------------------------------------------

std::vector<RelationDecl> all_properties(const PolicySet& policy,
                                         const std::vector<RelationDecl>& extra) {
  std::vector<RelationDecl> out = policy.relations;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

// Replays a counterexample through its printed scenario text.
std::optional<std::string> replay_problem(const PolicySet& policy,
                                          const AnalysisResult& res,
                                          const std::vector<RelationDecl>& props) {
  const std::string text = pretty_print(to_scenario(*res.counterexample));
  auto parsed = parse_scenario(text);
  if (!parsed.ok()) return "counterexample does not parse:\n" + text;
  const RunResult r = run(policy, *parsed.value);
  if (!r.ok()) return "counterexample replay: " + r.failure->to_string();
  if (!violates(r.trace.final_state, policy, props)) {
    return "counterexample replays to a safe state:\n" + text;
  }
  return std::nullopt;
}

Check analyzer_vs_oracle() {
  Check c;
  const auto t0 = SteadyClock::now();
  Rng rng(0xAC5);
  std::size_t unsafe = 0;
  std::size_t paths = 0;

  // The pest/water example: unsafe in two steps without the relation, safe
  // with it.
  {
    PolicySet p = *parse_policy(
                       "device Drone type=Drone\ndevice Sprinkler type=Sprinkler\n"
                       "rule on Drone:\n  allow SPRAY by ANY as PestSpray\n"
                       "rule on Sprinkler:\n  allow TURN-ON by ANY as WaterSpray\n")
                       .value;
    RelationDecl inc;
    inc.kind = RelationKind::Incompatible;
    inc.a = "PestSpray"_id;
    inc.b = "WaterSpray"_id;
    AnalyzerOptions opt;
    opt.depth = 4;
    opt.properties = {inc};
    const auto res = analyze(p, initial_state(p), derive_universe(p), opt);
    if (res.safe || res.depth != 2) c.fail("pest/water without relation not unsafe at 2");
    p.relations.push_back(inc);
    opt.properties = safety_properties(p);
    if (!analyze(p, initial_state(p), derive_universe(p), opt).safe) {
      c.fail("pest/water with relation not safe");
    }
  }

  for (std::size_t n = 0; n < kAnalyzerPolicies && c.ok; ++n) {
    SmallPolicyConfig cfg;
    cfg.max_devices = 3;
    cfg.max_rules = 4;
    const PolicySet policy = random_small_policy(rng, cfg);
    // Half the policies are checked only against the relations the engine
    // enforces, which keeps most of them safe and explored to full depth.
    std::vector<RelationDecl> extra;
    if (chance(rng, 0.5)) extra = random_properties(rng, policy.devices.size());
    RequestUniverse universe = derive_universe(policy);
    std::shuffle(universe.requests.begin(), universe.requests.end(), rng);
    if (universe.requests.size() > kMaxUniverse) universe.requests.resize(kMaxUniverse);
    const std::vector<Duration> grains{0, 60, 3600};
    universe.granularity = pick(rng, grains);
    const std::size_t depth = uniform(rng, 1, 4);

    AnalyzerOptions opt;
    opt.depth = depth;
    opt.properties = safety_properties(policy, extra);
    const EcosystemState init = initial_state(policy);
    const AnalysisResult res = analyze(policy, init, universe, opt);
    const auto props = all_properties(policy, extra);
    const NaiveVerdict naive = naive_reachability(policy, init, universe, props, depth);
    paths += naive.paths;
    const std::string where = "policy " + std::to_string(n) + " depth " +
                              std::to_string(depth) + "\n" + pretty_print(policy);
    if (res.safe == naive.unsafe) {
      c.fail("verdict mismatch, analyzer " + std::string(res.safe ? "safe" : "unsafe") +
             ", " + where);
      break;
    }
    if (!res.safe) {
      ++unsafe;
      if (res.depth != naive.depth) {
        c.fail("counterexample length " + std::to_string(res.depth) + " vs shortest " +
               std::to_string(naive.depth) + ", " + where);
        break;
      }
      if (auto problem = replay_problem(policy, res, props)) {
        c.fail(*problem + "\n" + where);
        break;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= kAnalyzerBudget) c.fail("runtime " + fmt_seconds(elapsed));
  if (c.ok && (unsafe == 0 || unsafe == kAnalyzerPolicies)) {
    c.fail("degenerate sample: " + std::to_string(unsafe) + " unsafe");
  }
  if (c.ok) {
    c.detail = std::to_string(kAnalyzerPolicies) + " policies agree with naive enumeration (" +
               std::to_string(unsafe) + " unsafe, all replayed; " + std::to_string(paths) +
               " naive paths), " + fmt_seconds(elapsed) + " < " +
               fmt_seconds(kAnalyzerBudget);
  }
  return c;
}

// ---------------------------------------------------------------------------

void check_spans(Check& c, const std::vector<ParseError>& errors,
                 const std::string& text, const std::string& what) {
  for (const auto& e : errors) {
    if (auto p = span_problem(e.span, text)) {
      c.fail(what + ": " + *p + " in " + e.to_string());
      return;
    }
  }
}

std::string mutate(Rng& rng, std::string text) {
  static const std::string kAlphabet = " \n\t:=()!&|\"\\#-<>*/,.0aZ\r\x01\xc3";
  for (std::size_t i = uniform(rng, 1, 3); i > 0; --i) {
    const std::size_t pos = text.empty() ? 0 : uniform(rng, 0, text.size() - 1);
    switch (uniform(rng, 0, 4)) {
      case 0:
        if (!text.empty()) text.erase(pos, 1);
        break;
      case 1:
        text.insert(pos, 1, kAlphabet[uniform(rng, 0, kAlphabet.size() - 1)]);
        break;
      case 2:
        if (!text.empty()) text[pos] = kAlphabet[uniform(rng, 0, kAlphabet.size() - 1)];
        break;
      case 3:
        text.resize(pos);
        break;
      default: {
        const std::size_t len = uniform(rng, 1, 12);
        text.insert(pos, text.substr(pos, len));
      }
    }
  }
  return text;
}

Check parser_round_trip() {
  Check c;
  Rng rng(0xAC6);
  std::vector<std::string> seeds;
  std::size_t files = 0;
  std::vector<std::string> seen;
  for (const auto& pair : fixture_pairs()) {
    for (const auto& file : {pair.policy, pair.scenario}) {
      if (std::find(seen.begin(), seen.end(), file) != seen.end()) continue;
      seen.push_back(file);
      ++files;
      const std::string text = read_file(fixture_path(file));
      seeds.push_back(text);
      const bool is_policy = file.ends_with(".acac");
      const std::string printed =
          is_policy ? pretty_print(load_policy(file)) : pretty_print(load_scenario(file));
      const std::string reprinted = is_policy ? pretty_print(*parse_policy(printed).value)
                                              : pretty_print(*parse_scenario(printed).value);
      const bool same = is_policy ? *parse_policy(printed).value == load_policy(file)
                                  : *parse_scenario(printed).value == load_scenario(file);
      if (!same || printed != reprinted) c.fail(file + " does not round-trip");
    }
  }
  for (std::size_t i = 0; i < kRandomAsts && c.ok; ++i) {
    const PolicySet p = random_policy_ast(rng);
    const std::string text = pretty_print(p);
    auto back = parse_policy(text);
    if (!back.ok() || !(*back.value == p)) {
      c.fail("random policy " + std::to_string(i) + ":\n" + text +
             (back.ok() ? std::string() : back.errors.front().to_string()));
    }
    seeds.push_back(text);
    const Scenario s = random_scenario_ast(rng);
    const std::string stext = pretty_print(s);
    auto sback = parse_scenario(stext);
    if (!sback.ok() || !(*sback.value == s)) {
      c.fail("random scenario " + std::to_string(i) + ":\n" + stext);
    }
    seeds.push_back(stext);
  }
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < kMutations && c.ok; ++i) {
    const std::string text = mutate(rng, pick(rng, seeds));
    try {
      auto p = parse_policy(text, "m.acac");
      if (!p.ok()) {
        ++rejected;
        if (p.errors.empty()) c.fail("rejected policy without errors");
        check_spans(c, p.errors, text, "mutated policy");
      }
      auto s = parse_scenario(text, "m.acsc");
      if (!s.ok()) {
        ++rejected;
        if (s.errors.empty()) c.fail("rejected scenario without errors");
        check_spans(c, s.errors, text, "mutated scenario");
      }
    } catch (const std::exception& e) {
      c.fail(std::string("parser threw: ") + e.what());
    }
  }
  if (c.ok) {
    c.detail = std::to_string(files) + " fixture files and " + std::to_string(kRandomAsts) +
               " random policy+scenario ASTs round-trip; " + std::to_string(rejected) +
               " parse rejections from " + std::to_string(kMutations) +
               " mutants, all spans in bounds";
  }
  return c;
}

// ---------------------------------------------------------------------------

Check determinism() {
  Check c;
  std::size_t replays = 0;
  for (const auto& pair : fixture_pairs()) {
    const PolicySet policy = load_policy(pair.policy);
    const Scenario sc = load_scenario(pair.scenario);
    const std::string a = format_trace(run(policy, sc).trace);
    const std::string b = format_trace(run(load_policy(pair.policy), sc).trace);
    if (a != b) c.fail(pair.scenario + ": traces differ");
    ++replays;
  }
  Rng rng(0xAC7);
  std::vector<PolicySet> policies;
  for (const auto& pair : example_pairs()) policies.push_back(load_policy(pair.policy));
  for (int i = 0; i < 30; ++i) policies.push_back(random_small_policy(rng, {}));
  std::size_t analyses = 0;
  for (const auto& policy : policies) {
    RequestUniverse u = derive_universe(policy);
    if (u.requests.size() > 10) u.requests.resize(10);
    u.granularity = 60;
    AnalyzerOptions opt;
    opt.depth = 3;
    opt.properties = safety_properties(policy, random_properties(rng, 3));
    std::string first;
    std::size_t first_states = 0;
    for (std::size_t workers : {1, 2, 4}) {
      opt.workers = workers;
      const AnalysisResult r = analyze(policy, initial_state(policy), u, opt);
      const std::string report = format_report(r);
      if (workers == 1) {
        first = report;
        first_states = r.states;
      } else if (report != first || r.states != first_states) {
        c.fail("analyzer report differs with " + std::to_string(workers) + " workers");
      }
    }
    ++analyses;
  }
  if (c.ok) {
    c.detail = std::to_string(replays) + " fixtures replay byte-identical; " +
               std::to_string(analyses) + " analyses identical for 1/2/4 workers";
  }
  return c;
}

// ---------------------------------------------------------------------------

Check default_deny() {
  Check c;
  Rng rng(0xAC8);
  std::size_t probes = 0;
  for (std::size_t n = 0; n < kDenyFuzz / 20 && c.ok; ++n) {
    const PolicySet policy = random_small_policy(rng, {});
    PolicySet empty;
    empty.devices = policy.devices;
    empty.subjects = policy.subjects;
    empty.environment = policy.environment;

    // Reach some state under the real policy first.
    EcosystemState state = initial_state(policy);
    for (std::size_t k = uniform(rng, 0, 15); k > 0; --k) {
      const TimedEvent ev = next_random_event(rng, policy, state);
      state = apply_event(state, policy, ev.time, ev.event).state;
    }
    for (int k = 0; k < 20; ++k, ++probes) {
      const TimedEvent ev = next_random_event(rng, policy, state);
      Request req;
      if (const auto* r = std::get_if<RequestEvent>(&ev.event)) {
        req = {r->subject, r->op, r->object, r->activity, ev.time};
      } else {
        req = {"u0"_id, "ON"_id, "D0"_id, "A"_id, ev.time};
      }
      const bool against_empty = k % 2 == 0;
      // No rule of the real policy uses this op.
      if (!against_empty) req.op = EntityId(chance(rng, 0.5) ? "NOPE" : "on");
      const PolicySet& target = against_empty ? empty : policy;
      const Outcome o = decide_and_commit(state, target, req);
      EcosystemState want = state;
      want.clock = req.time;
      if (o.decision.permit || o.decision.reason != DenyReason::NoMatchingRule) {
        c.fail("request not denied with no-matching-rule");
      } else if (!(o.state == want)) {
        c.fail("denied request changed the state");
      } else if (!o.decision.executed_obligations.empty() || !o.decision.revoked.empty() ||
                 !o.decision.started.empty() || !o.decision.preempted.empty()) {
        c.fail("denied request reported effects");
      }
    }
  }
  if (c.ok) {
    c.detail = std::to_string(probes) +
               " fuzzed requests against empty and non-matching policies: "
               "Deny(no-matching-rule), state unchanged but for the clock";
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    Check (*fn)();
  };
  const Criterion criteria[] = {
      {1, corpus_replay},       {2, relation_suite},  {3, incompatible_property},
      {4, limit_property},      {5, analyzer_vs_oracle}, {6, parser_round_trip},
      {7, determinism},         {8, default_deny},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      c = cr.fn();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    std::printf("AC%d %s %s\n", cr.id, c.ok ? "PASS" : "FAIL", c.detail.c_str());
    std::fflush(stdout);
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
