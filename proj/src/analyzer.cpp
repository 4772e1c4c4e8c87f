#include "acac/analyzer.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "acac/engine.hpp"

namespace acac {
namespace {

void collect_windows(const Expr& e, std::set<Duration>& out) {
  if (e.kind == Expr::Kind::Leaf) {
    if (const auto* sc = std::get_if<StateCondition>(&*e.atom); sc && sc->window) {
      out.insert(*sc->window);
    }
    return;
  }
  for (const auto& ch : e.children) collect_windows(ch, out);
}

std::set<Duration> limit_windows(const PolicySet& policy) {
  std::set<Duration> out;
  for (const auto& l : policy.limits) out.insert(l.window);
  for (const auto& r : policy.rules) {
    for (const auto& l : r.limits) out.insert(l.window);
  }
  return out;
}

bool is_property(const RelationDecl& r) {
  if (r.kind == RelationKind::Incompatible) return true;
  if (r.kind != RelationKind::Concurrent) return false;
  const auto* d = std::get_if<ConcurrentDetail>(&r.detail);
  return d && d->must;
}

bool active(const ActivityInstance& i) {
  return i.status == ActivityStatus::Active;
}

bool incompatible_violated(const EcosystemState& s, const RelationDecl& r) {
  for (const auto& [kx, x] : s.live) {
    if (!active(x) || x.activity != r.a) continue;
    for (const auto& [ky, y] : s.live) {
      if (!active(y) || y.activity != r.b || kx == ky) continue;
      if (scope_holds(r.scope, s, x.device, y.device)) return true;
    }
  }
  return false;
}

bool must_violated(const EcosystemState& s, const RelationDecl& r) {
  const auto& on = std::get<ConcurrentDetail>(r.detail).on;
  auto partner_device = [&](const EntityId& d) { return on ? *on : d; };
  for (const auto& [k, x] : s.live) {
    if (!active(x) || x.activity != r.a) continue;
    const ActivityInstance* b = s.find_live(partner_device(x.device), r.b);
    if (!b || !active(*b)) return true;
  }
  for (const auto& [k, y] : s.live) {
    if (!active(y) || y.activity != r.b) continue;
    bool has_trigger = false;
    for (const auto& [kx, x] : s.live) {
      if (active(x) && x.activity == r.a &&
          partner_device(x.device) == y.device) {
        has_trigger = true;
        break;
      }
    }
    if (!has_trigger) return true;
  }
  return false;
}

// Canonical state text. Counter timestamps outside the current fixed window
// of every limit window are dropped: they can no longer affect a decision.
std::string state_key(const EcosystemState& s,
                      const std::set<Duration>& windows) {
  std::ostringstream os;
  os << s.clock << '\n';
  for (const auto& [k, i] : s.live) {
    os << 'L' << i.device.str() << ' ' << i.activity.str() << ' '
       << i.initiator.str() << ' ' << i.start_time << ' '
       << to_string(i.status) << ' '
       << (i.origin_rule ? std::to_string(*i.origin_rule) : "-") << '\n';
  }
  for (const auto& i : s.history) {
    os << 'H' << i.device.str() << ' ' << i.activity.str() << ' '
       << i.initiator.str() << ' ' << i.start_time << ' '
       << to_string(i.status) << ' ' << i.end_time.value_or(-1) << ' '
       << (i.ended_by ? i.ended_by->str() : "-") << '\n';
  }
  for (const auto& [name, v] : s.environment) {
    os << 'E' << name << ' ' << kind_name(v) << ':' << to_string(v) << '\n';
  }
  for (const auto& [key, times] : s.counters) {
    std::vector<Timestamp> kept;
    for (Timestamp t : times) {
      bool relevant = std::any_of(windows.begin(), windows.end(), [&](Duration w) {
        return t / w == s.clock / w;
      });
      if (relevant) kept.push_back(t);
    }
    if (kept.empty()) continue;
    std::sort(kept.begin(), kept.end());
    os << 'C' << to_string(key.scope) << ' ' << key.activity.str() << ' '
       << (key.subject_or_object ? key.subject_or_object->str() : "-");
    for (Timestamp t : kept) os << ' ' << t;
    os << '\n';
  }
  return os.str();
}

struct Successor {
  EcosystemState state;
  AnalyzerStep step;
  std::string key;
};

struct Node {
  std::size_t parent = 0;
  AnalyzerStep step;
};

std::string describe_property(const RelationDecl& r) {
  std::string out = std::string(to_string(r.kind)) + " " + r.a.str() + " " +
                    r.b.str() + " scope=" + std::string(to_string(r.scope));
  if (const auto* d = std::get_if<ConcurrentDetail>(&r.detail); d && d->on) {
    out += " on=" + d->on->str();
  }
  return out;
}

}  // namespace

RequestUniverse derive_universe(const PolicySet& policy) {
  EcosystemState s = initial_state(policy);
  RequestUniverse u;
  std::set<std::tuple<EntityId, EntityId, EntityId, EntityId>> seen;
  for (const auto& rule : policy.rules) {
    for (const auto& [sid, subject] : s.subjects) {
      if (!matches_subject(rule.source, s, sid)) continue;
      for (const auto& [did, device] : s.devices) {
        if (!matches_device(rule.object, device)) continue;
        if (!seen.insert({sid, rule.op, did, rule.activity}).second) continue;
        u.requests.push_back(Request{sid, rule.op, did, rule.activity, 0});
      }
    }
  }
  return u;
}

ParseResult<RequestUniverse> parse_universe(std::string_view text,
                                            std::string_view file) {
  ParseResult<RequestUniverse> result;
  RequestUniverse u;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    struct Word {
      std::string text;
      std::size_t column;
    };
    std::vector<Word> words;
    for (std::size_t i = 0; i < line.size();) {
      if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
             line[j] != '\r') {
        ++j;
      }
      words.push_back({std::string(line.substr(i, j - i)), i + 1});
      i = j;
    }
    auto error = [&](const Word& w, std::string expected) {
      result.errors.push_back(ParseError{
          SourceSpan{std::string(file), line_no, w.column,
                     std::max<std::size_t>(1, w.text.size())},
          std::move(expected), w.text});
    };
    if (!words.empty()) {
      if (words[0].text == "request") {
        if (words.size() != 5) {
          error(words.back(), "request <subject> <op> <object> <activity>");
        } else {
          u.requests.push_back(Request{EntityId(words[1].text),
                                       EntityId(words[2].text),
                                       EntityId(words[3].text),
                                       EntityId(words[4].text), 0});
        }
      } else if (words[0].text == "granularity") {
        auto d = words.size() == 2 ? parse_duration(words[1].text) : std::nullopt;
        if (!d) {
          error(words.back(), "granularity <duration>");
        } else {
          u.granularity = *d;
        }
      } else {
        error(words[0], "request or granularity");
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  if (result.errors.empty()) result.value = std::move(u);
  return result;
}

std::vector<Duration> clock_advances(const PolicySet& policy,
                                     const RequestUniverse& universe) {
  std::set<Duration> windows = limit_windows(policy);
  for (const auto& r : policy.relations) {
    if (r.window) windows.insert(*r.window);
  }
  for (const auto& rule : policy.rules) {
    if (rule.pre) collect_windows(*rule.pre, windows);
  }
  std::set<Duration> steps;
  if (universe.granularity > 0) steps.insert(universe.granularity);
  for (Duration w : windows) steps.insert(w + 1);
  return {steps.begin(), steps.end()};
}

std::vector<RelationDecl> safety_properties(
    const PolicySet& policy, const std::vector<RelationDecl>& extra) {
  std::vector<RelationDecl> out;
  for (const auto& r : policy.relations) {
    if (is_property(r)) out.push_back(r);
  }
  for (const auto& r : extra) {
    if (is_property(r)) out.push_back(r);
  }
  return out;
}

std::optional<RelationDecl> find_violation(
    const EcosystemState& state, const std::vector<RelationDecl>& properties) {
  for (const auto& r : properties) {
    const bool hit = r.kind == RelationKind::Incompatible
                         ? incompatible_violated(state, r) ||
                               incompatible_violated(
                                   state, RelationDecl{r.kind, r.b, r.a, r.scope,
                                                       r.window, r.guard,
                                                       r.detail})
                         : must_violated(state, r);
    if (hit) return r;
  }
  return std::nullopt;
}

AnalysisResult analyze(const PolicySet& policy, const EcosystemState& initial,
                       const RequestUniverse& universe,
                       const AnalyzerOptions& options) {
  const std::set<Duration> windows = limit_windows(policy);
  const std::vector<Duration> advances = clock_advances(policy, universe);
  const std::size_t workers = std::max<std::size_t>(1, options.workers);

  AnalysisResult result;
  std::vector<Node> nodes{Node{}};
  std::unordered_set<std::string> visited{state_key(initial, windows)};

  auto unsafe = [&](std::size_t node, const EcosystemState& s,
                    const RelationDecl& violated, std::size_t depth) {
    Counterexample cex;
    cex.violated = violated;
    for (const auto& [k, i] : s.live) cex.final_live.push_back(i);
    for (std::size_t n = node; n != 0; n = nodes[n].parent) {
      cex.steps.push_back(nodes[n].step);
    }
    std::reverse(cex.steps.begin(), cex.steps.end());
    result.safe = false;
    result.depth = depth;
    result.states = visited.size();
    result.counterexample = std::move(cex);
  };

  if (auto v = find_violation(initial, options.properties)) {
    unsafe(0, initial, *v, 0);
    return result;
  }

  auto expand = [&](const EcosystemState& s) {
    std::vector<Successor> out;
    for (const auto& proto : universe.requests) {
      Request req = proto;
      req.time = s.clock;
      Outcome o = decide_and_commit(s, policy, req);
      if (!o.decision.permit) continue;
      std::string key = state_key(o.state, windows);
      out.push_back({std::move(o.state), AnalyzerStep{req, req.time}, std::move(key)});
    }
    for (Duration d : advances) {
      EcosystemState next = advance_clock(s, s.clock + d);
      std::string key = state_key(next, windows);
      out.push_back({std::move(next), AnalyzerStep{std::nullopt, s.clock + d},
                     std::move(key)});
    }
    return out;
  };

  std::vector<std::pair<std::size_t, EcosystemState>> frontier;
  frontier.emplace_back(0, initial);
  for (std::size_t depth = 1; depth <= options.depth && !frontier.empty();
       ++depth) {
    std::vector<std::vector<Successor>> expanded(frontier.size());
    if (workers == 1 || frontier.size() < 2) {
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        expanded[i] = expand(frontier[i].second);
      }
    } else {
      std::vector<std::thread> pool;
      const std::size_t n = std::min(workers, frontier.size());
      for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < frontier.size(); i += n) {
            expanded[i] = expand(frontier[i].second);
          }
        });
      }
      for (auto& t : pool) t.join();
    }

    std::vector<std::pair<std::size_t, EcosystemState>> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (auto& succ : expanded[i]) {
        if (!visited.insert(std::move(succ.key)).second) continue;
        nodes.push_back(Node{frontier[i].first, succ.step});
        if (auto v = find_violation(succ.state, options.properties)) {
          unsafe(nodes.size() - 1, succ.state, *v, depth);
          return result;
        }
        next.emplace_back(nodes.size() - 1, std::move(succ.state));
      }
    }
    frontier = std::move(next);
  }
  result.depth = options.depth;
  result.states = visited.size();
  return result;
}

Scenario to_scenario(const Counterexample& cex) {
  Scenario sc;
  for (const auto& step : cex.steps) {
    if (!step.request) continue;
    const Request& r = *step.request;
    sc.expectations[sc.events.size()] = Expectation{true, std::nullopt};
    sc.events.push_back(
        TimedEvent{step.time, RequestEvent{r.subject, r.op, r.object, r.activity}});
  }
  return sc;
}

std::string format_report(const AnalysisResult& result) {
  if (result.safe) return "SAFE depth=" + std::to_string(result.depth) + "\n";
  const Counterexample& cex = *result.counterexample;
  std::string out = "# UNSAFE depth=" + std::to_string(result.depth) +
                    " violated=" + describe_property(cex.violated) + "\n";
  out += "# live";
  for (const auto& i : cex.final_live) {
    out += " " + i.device.str() + "/" + i.activity.str() + ":" +
           std::string(to_string(i.status)) + "@" + i.initiator.str();
  }
  out += "\n";
  return out + pretty_print(to_scenario(cex));
}

}  // namespace acac
