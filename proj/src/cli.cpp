#include "acac/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "acac/analyzer.hpp"
#include "acac/dsl.hpp"
#include "acac/engine.hpp"
#include "acac/simulator.hpp"

namespace acac {
namespace {

// Reports a failure to load an input; the command exits with kExitError.
struct LoadError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError{"cannot read " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class T>
T unwrap(ParseResult<T> r) {
  if (!r.ok()) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + e.to_string();
    throw LoadError{msg};
  }
  return std::move(*r.value);
}

PolicySet load_policy(const std::string& path) {
  PolicySet p = unwrap(parse_policy(read_file(path), path));
  auto errors = validate(p);
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) {
      msg += (msg.empty() ? "" : "\n") + path + ": " +
             std::string(to_string(e.kind)) + ": " + e.message;
    }
    throw LoadError{msg};
  }
  return p;
}

Scenario load_scenario(const std::string& path, const PolicySet& policy) {
  Scenario sc = unwrap(parse_scenario(read_file(path), path));
  auto problems = validate_scenario(policy, sc);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "\n") + path + ": " + p;
    throw LoadError{msg};
  }
  return sc;
}

struct CheckArgs {
  std::string policy;
  std::string state;
  std::optional<Timestamp> at;
  std::vector<std::string> request;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  PolicySet policy = load_policy(a.policy);
  EcosystemState state = initial_state(policy);
  if (!a.state.empty()) {
    Scenario prefix = load_scenario(a.state, policy);
    prefix.expectations.clear();
    state = run(policy, prefix).trace.final_state;
  }
  Request req{EntityId(a.request[0]), EntityId(a.request[1]),
              EntityId(a.request[2]), EntityId(a.request[3]),
              a.at.value_or(state.clock)};
  if (!state.find_subject(req.subject)) {
    throw LoadError{"unknown subject " + req.subject.str()};
  }
  if (!state.find_device(req.object)) {
    throw LoadError{"unknown device " + req.object.str()};
  }
  if (req.time < state.clock) {
    err << "request time " << req.time << " predates state clock "
        << state.clock << '\n';
    return kExitError;
  }
  Outcome o = decide_and_commit(state, policy, req);
  out << format_decision_line(req, o.decision) << '\n';
  return o.decision.permit ? kExitOk : kExitNegative;
}

struct ReplayArgs {
  std::string policy;
  std::string scenario;
  std::string out;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err) {
  PolicySet policy = load_policy(a.policy);
  Scenario sc = load_scenario(a.scenario, policy);
  RunResult r = run(policy, sc);
  const std::string text = format_trace(r.trace);
  if (a.out.empty()) {
    out << text;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw LoadError{"cannot write " + a.out};
    f << text;
  }
  if (r.failure) {
    err << "expectation failed: " << r.failure->to_string() << '\n';
    return kExitNegative;
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string policy;
  std::size_t depth = 6;
  std::string universe;
  std::string properties;
  std::size_t workers = 1;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream&) {
  PolicySet policy = load_policy(a.policy);
  RequestUniverse universe =
      a.universe.empty() ? derive_universe(policy)
                         : unwrap(parse_universe(read_file(a.universe), a.universe));
  std::vector<RelationDecl> extra;
  if (!a.properties.empty()) {
    extra = unwrap(parse_policy(read_file(a.properties), a.properties)).relations;
  }
  AnalyzerOptions opts;
  opts.depth = a.depth;
  opts.workers = a.workers;
  opts.properties = safety_properties(policy, extra);
  AnalysisResult r = analyze(policy, initial_state(policy), universe, opts);
  out << format_report(r);
  return r.safe ? kExitOk : kExitNegative;
}

struct FmtArgs {
  std::string policy;
  std::string scenario;
  bool check = false;
};

int cmd_fmt(const FmtArgs& a, std::ostream& out, std::ostream& err) {
  const std::string& path = a.policy.empty() ? a.scenario : a.policy;
  const std::string text = read_file(path);
  const std::string canonical =
      a.policy.empty() ? pretty_print(unwrap(parse_scenario(text, path)))
                       : pretty_print(unwrap(parse_policy(text, path)));
  if (!a.check) {
    out << canonical;
    return kExitOk;
  }
  if (canonical == text) return kExitOk;
  err << path << ": not in canonical form\n";
  return kExitNegative;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Activity-centric access control tool", "acac"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Decide one request");
  c->add_option("-p,--policy", check.policy, "Policy file (.acac)")->required();
  c->add_option("--state", check.state, "Scenario prefix replayed first (.acsc)");
  c->add_option("--at", check.at, "Request time (default: state clock)");
  c->add_option("request", check.request, "<subject> <op> <object> <activity>")
      ->expected(4)
      ->required();

  ReplayArgs replay;
  auto* r = app.add_subcommand("replay", "Replay a scenario and print the trace");
  r->add_option("-p,--policy", replay.policy, "Policy file (.acac)")->required();
  r->add_option("-s,--scenario", replay.scenario, "Scenario file (.acsc)")->required();
  r->add_option("-o,--out", replay.out, "Write the trace here");

  AnalyzeArgs analyze_args;
  auto* an = app.add_subcommand("analyze", "Bounded safety analysis");
  an->add_option("-p,--policy", analyze_args.policy, "Policy file (.acac)")->required();
  an->add_option("--depth", analyze_args.depth, "Depth bound")->capture_default_str();
  an->add_option("--universe", analyze_args.universe, "Request universe file");
  an->add_option("--properties", analyze_args.properties,
                 "Extra relations to check (.acac, relation lines only)");
  an->add_option("--workers", analyze_args.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  FmtArgs fmt;
  auto* f = app.add_subcommand("fmt", "Print a file in canonical form");
  auto* fp = f->add_option("--policy", fmt.policy, "Policy file (.acac)");
  auto* fs = f->add_option("--scenario", fmt.scenario, "Scenario file (.acsc)");
  fp->excludes(fs);
  f->add_flag("--check", fmt.check, "Exit 1 when the file is not canonical");

  std::vector<std::string> argv_store{"acac"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (c->parsed()) return cmd_check(check, out, err);
    if (r->parsed()) return cmd_replay(replay, out, err);
    if (an->parsed()) return cmd_analyze(analyze_args, out, err);
    if (fmt.policy.empty() && fmt.scenario.empty()) {
      err << "fmt: one of --policy or --scenario is required\n";
      return kExitError;
    }
    return cmd_fmt(fmt, out, err);
  } catch (const LoadError& e) {
    err << e.message << '\n';
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const EngineError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace acac
