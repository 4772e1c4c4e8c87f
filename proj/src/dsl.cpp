#include "acac/dsl.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <sstream>

namespace acac {

std::string ParseError::to_string() const {
  return span.file + ":" + std::to_string(span.line) + ":" +
         std::to_string(span.column) + ": expected " + expected +
         ", found '" + found + "'";
}

namespace {

// ---------------------------------------------------------------------------
// Lexing

enum class Tok {
  Word,
  String,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Bang,
  NotEqual,
  AndAnd,
  OrOr,
  Less,
  Greater,
  Equal,
  Arrow,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;  // 1-based
  std::size_t length;
};

// Thrown inside a line parser; converted to a ParseError by the caller.
struct Failure {
  std::string expected;
  std::string found;
  std::size_t column;
  std::size_t length;
};

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' ||
         c == ':' || c == '*' || c == '/' || c == '+' || c == '@' || c >= 0x80;
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  const std::size_t n = line.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      while (j < n && line[j] != '"') {
        if (line[j] == '\\' && j + 1 < n) {
          value += line[j + 1];
          j += 2;
        } else {
          value += line[j++];
        }
      }
      if (j >= n) {
        throw Failure{"closing '\"'", std::string(line.substr(i)), i + 1,
                      n - i};
      }
      out.push_back({Tok::String, std::move(value), i + 1, j - i + 1});
      i = j + 1;
      continue;
    }
    if (i + 1 < n) {
      const std::string_view two = line.substr(i, 2);
      static constexpr std::array<std::pair<std::string_view, Tok>, 4> pairs{{
          {"!=", Tok::NotEqual},
          {"&&", Tok::AndAnd},
          {"||", Tok::OrOr},
          {"->", Tok::Arrow},
      }};
      auto hit = std::find_if(pairs.begin(), pairs.end(),
                              [&](const auto& p) { return p.first == two; });
      if (hit != pairs.end()) {
        out.push_back({hit->second, std::string(two), i + 1, 2});
        i += 2;
        continue;
      }
    }
    Tok single;
    bool is_single = true;
    switch (c) {
      case '(':
        single = Tok::LParen;
        break;
      case ')':
        single = Tok::RParen;
        break;
      case ',':
        single = Tok::Comma;
        break;
      case ';':
        single = Tok::Semicolon;
        break;
      case '!':
        single = Tok::Bang;
        break;
      case '<':
        single = Tok::Less;
        break;
      case '>':
        single = Tok::Greater;
        break;
      case '=':
        single = Tok::Equal;
        break;
      default:
        is_single = false;
    }
    if (is_single) {
      out.push_back({single, std::string(1, c), i + 1, 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_word_char(static_cast<unsigned char>(line[j])) &&
           !(line[j] == '-' && j + 1 < n && line[j + 1] == '>')) {
      ++j;
    }
    if (j == i) throw Failure{"a token", std::string(1, c), i + 1, 1};
    out.push_back({Tok::Word, std::string(line.substr(i, j - i)), i + 1, j - i});
    i = j;
  }
  return out;
}

bool is_number_word(std::string_view w) {
  if (w.empty()) return false;
  std::size_t first = w[0] == '-' ? 1 : 0;
  if (first >= w.size() || w[first] < '0' || w[first] > '9') return false;
  double d = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), d);
  return ec == std::errc{} && ptr == w.data() + w.size();
}

bool is_valid_id(std::string_view w) {
  if (w.empty()) return false;
  for (unsigned char c : w) {
    if (!is_word_char(c) || c == ':' || c == '*' || c == '/') return false;
  }
  return true;
}

constexpr std::array<std::string_view, 5> kContextAtoms{
    "value", "location", "rel", "time_in", "requester"};

bool is_context_atom(std::string_view w) {
  return std::find(kContextAtoms.begin(), kContextAtoms.end(), w) !=
         kContextAtoms.end();
}

// ---------------------------------------------------------------------------
// Token cursor

class Cursor {
 public:
  Cursor(std::vector<Token> tokens, std::size_t line_length)
      : toks_(std::move(tokens)), line_length_(line_length) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek(std::size_t k = 0) const {
    return pos_ + k < toks_.size() ? &toks_[pos_ + k] : nullptr;
  }
  bool peek_is(Tok kind, std::size_t k = 0) const {
    const Token* t = peek(k);
    return t && t->kind == kind;
  }
  bool peek_word(std::string_view w, std::size_t k = 0) const {
    const Token* t = peek(k);
    return t && t->kind == Tok::Word && t->text == w;
  }

  const Token& next(const std::string& expected) {
    if (done()) fail(expected);
    return toks_[pos_++];
  }

  bool accept(Tok kind) {
    if (!peek_is(kind)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok kind, const std::string& expected) {
    const Token& t = next(expected);
    if (t.kind != kind) fail_at(t, expected);
    return t;
  }
  const Token& expect_word(const std::string& expected) {
    return expect(Tok::Word, expected);
  }
  void expect_keyword(std::string_view w) {
    const Token& t = next("'" + std::string(w) + "'");
    if (t.kind != Tok::Word || t.text != w) fail_at(t, "'" + std::string(w) + "'");
  }
  void expect_end(const std::string& expected) {
    if (!done()) fail_at(*peek(), expected);
  }

  [[noreturn]] void fail(const std::string& expected) const {
    if (const Token* t = peek()) fail_at(*t, expected);
    if (!toks_.empty()) {
      const Token& last = toks_.back();
      throw Failure{expected, "end of line", last.column, last.length};
    }
    throw Failure{expected, "end of line", 1,
                  std::max<std::size_t>(1, std::min<std::size_t>(line_length_, 1))};
  }
  [[noreturn]] static void fail_at(const Token& t, const std::string& expected) {
    throw Failure{expected, t.text, t.column, t.length};
  }

  const Token& back() const { return toks_[pos_ - 1]; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_length_;
};

EntityId parse_id(Cursor& c, const std::string& what) {
  const Token& t = c.expect_word(what);
  if (!is_valid_id(t.text)) Cursor::fail_at(t, what);
  return EntityId(t.text);
}

Pattern pattern_from_word(const Token& t) {
  const std::string& w = t.text;
  if (w == "ANY") return Pattern::any();
  if (w == "SUBJECT") return Pattern::requester();
  if (w == "OBJECT") return Pattern::target();
  auto prefixed = [&](std::string_view prefix) -> std::optional<EntityId> {
    if (w.rfind(prefix, 0) != 0) return std::nullopt;
    std::string rest = w.substr(prefix.size());
    if (!is_valid_id(rest)) Cursor::fail_at(t, "a pattern name");
    return EntityId(rest);
  };
  if (auto n = prefixed("type:")) return Pattern::type(*n);
  if (auto n = prefixed("group:")) return Pattern::group(*n);
  if (!is_valid_id(w)) Cursor::fail_at(t, "a pattern");
  return Pattern::id(EntityId(w));
}

Pattern parse_pattern(Cursor& c) {
  return pattern_from_word(c.expect_word("a pattern"));
}

AttributeValue parse_value(Cursor& c) {
  const Token& t = c.next("a value");
  if (t.kind == Tok::String) return t.text;
  if (t.kind != Tok::Word) Cursor::fail_at(t, "a value");
  if (t.text == "true") return true;
  if (t.text == "false") return false;
  if (is_number_word(t.text)) {
    double d = 0;
    std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
    return d;
  }
  return t.text;
}

Duration parse_duration_token(Cursor& c) {
  const Token& t = c.expect_word("a duration");
  auto d = parse_duration(t.text);
  if (!d) Cursor::fail_at(t, "a duration like 30s, 5m, 2h, 1d or 1w");
  return *d;
}

ObligationAction parse_obligation(Cursor& c) {
  const Token& k = c.expect_word("start, stop, halt or resume");
  ObligationAction o;
  if (k.text == "start") {
    o.kind = ObligationKind::Start;
  } else if (k.text == "stop") {
    o.kind = ObligationKind::Stop;
  } else if (k.text == "halt") {
    o.kind = ObligationKind::Halt;
  } else if (k.text == "resume") {
    o.kind = ObligationKind::Resume;
  } else {
    Cursor::fail_at(k, "start, stop, halt or resume");
  }
  o.activity = parse_id(c, "an activity");
  c.expect(Tok::LParen, "'('");
  o.object = parse_pattern(c);
  c.expect(Tok::RParen, "')'");
  return o;
}

std::vector<ObligationAction> parse_obligations(Cursor& c) {
  std::vector<ObligationAction> out;
  out.push_back(parse_obligation(c));
  while (c.accept(Tok::Semicolon)) out.push_back(parse_obligation(c));
  return out;
}

// ---------------------------------------------------------------------------
// Expressions

class ExprParser {
 public:
  ExprParser(Cursor& c, Phase phase, std::string_view stop_word = {})
      : c_(c), phase_(phase), stop_(stop_word) {}

  Expr parse() {
    if (at_end()) c_.fail("a condition");
    return parse_or();
  }

 private:
  bool at_end() const {
    return c_.done() || (!stop_.empty() && c_.peek_word(stop_));
  }

  Expr parse_or() {
    std::vector<Expr> parts{parse_and()};
    while (c_.accept(Tok::OrOr)) parts.push_back(parse_and());
    return Expr::any(std::move(parts));
  }

  Expr parse_and() {
    std::vector<Expr> parts{parse_unary()};
    while (c_.accept(Tok::AndAnd)) parts.push_back(parse_unary());
    return Expr::all(std::move(parts));
  }

  Expr parse_unary() {
    if (c_.accept(Tok::Bang)) {
      if (c_.accept(Tok::LParen)) {
        Expr inner = parse_or();
        c_.expect(Tok::RParen, "')'");
        return Expr::negate(std::move(inner));
      }
      const Token* t = c_.peek();
      if (t && t->kind == Tok::Word && !is_context_atom(t->text)) {
        return parse_atom(true);
      }
      return Expr::negate(parse_atom(false));
    }
    if (c_.accept(Tok::LParen)) {
      Expr inner = parse_or();
      c_.expect(Tok::RParen, "')'");
      return inner;
    }
    return parse_atom(false);
  }

  Expr parse_atom(bool negated) {
    const Token& head = c_.expect_word("a condition");
    if (is_context_atom(head.text) && c_.peek_is(Tok::LParen)) {
      return Expr::leaf(parse_context_atom(head));
    }
    StateCondition sc;
    sc.phase = phase_;
    sc.negated = negated;
    if (head.text == "ANY") {
      sc.activity = ActivityRef::any();
    } else if (head.text == "inactive") {
      sc.activity = ActivityRef::inactive();
    } else if (is_valid_id(head.text)) {
      sc.activity = ActivityRef::named(EntityId(head.text));
    } else {
      Cursor::fail_at(head, "an activity");
    }
    c_.expect(Tok::LParen, "'(' after activity");
    sc.object = parse_pattern(c_);
    c_.expect(Tok::Comma, "','");
    sc.source = parse_pattern(c_);
    c_.expect(Tok::RParen, "')'");
    if (c_.peek_word("within")) {
      const Token& w = c_.next("within");
      if (phase_ != Phase::Pre) {
        Cursor::fail_at(w, "no window outside pre conditions");
      }
      sc.window = parse_duration_token(c_);
    }
    return Expr::leaf(std::move(sc));
  }

  Atom parse_context_atom(const Token& head) {
    c_.expect(Tok::LParen, "'('");
    if (head.text == "value") {
      ValueComparison v;
      v.name = c_.expect_word("a value name").text;
      c_.expect(Tok::RParen, "')'");
      const Token& op = c_.next("a comparison operator");
      switch (op.kind) {
        case Tok::Less:
          v.op = CompareOp::Less;
          break;
        case Tok::Greater:
          v.op = CompareOp::Greater;
          break;
        case Tok::Equal:
          v.op = CompareOp::Equal;
          break;
        case Tok::NotEqual:
          v.op = CompareOp::NotEqual;
          break;
        default:
          Cursor::fail_at(op, "<, >, = or !=");
      }
      v.literal = parse_value(c_);
      return v;
    }
    if (head.text == "location") {
      LocationTest l;
      l.object = parse_pattern(c_);
      c_.expect(Tok::RParen, "')'");
      const Token& op = c_.next("= or !=");
      if (op.kind == Tok::Equal) {
        l.equal = true;
      } else if (op.kind == Tok::NotEqual) {
        l.equal = false;
      } else {
        Cursor::fail_at(op, "= or !=");
      }
      l.location = parse_id(c_, "a location");
      return l;
    }
    if (head.text == "rel") {
      RelationTest r;
      r.relation = c_.expect_word("a relation name").text;
      c_.expect(Tok::Comma, "','");
      r.subject = parse_pattern(c_);
      c_.expect(Tok::Comma, "','");
      r.target = parse_pattern(c_);
      c_.expect(Tok::RParen, "')'");
      return r;
    }
    if (head.text == "time_in") {
      TimeOfDayRange t;
      t.from = parse_duration_token(c_);
      c_.expect(Tok::Comma, "','");
      t.to = parse_duration_token(c_);
      c_.expect(Tok::RParen, "')'");
      return t;
    }
    RequesterTest r;
    r.subject = parse_pattern(c_);
    c_.expect(Tok::RParen, "')'");
    return r;
  }

  Cursor& c_;
  Phase phase_;
  std::string_view stop_;
};

Expr parse_full_expr(Cursor& c, Phase phase) {
  Expr e = ExprParser(c, phase).parse();
  c.expect_end("'&&', '||' or end of condition");
  return e;
}

// ---------------------------------------------------------------------------
// Line splitting

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

ParseError to_error(const Failure& f, std::string_view file, std::size_t line) {
  return ParseError{
      SourceSpan{std::string(file), line, f.column, std::max<std::size_t>(1, f.length)},
      f.expected, f.found};
}

UsageLimit parse_limit_body(Cursor& c) {
  UsageLimit l;
  const Token& scope = c.expect_word("per-source, per-object or system-wide");
  if (scope.text == "per-source") {
    l.scope = CounterScope::PerSource;
  } else if (scope.text == "per-object") {
    l.scope = CounterScope::PerObject;
  } else if (scope.text == "system-wide") {
    l.scope = CounterScope::SystemWide;
  } else {
    Cursor::fail_at(scope, "per-source, per-object or system-wide");
  }
  l.activity = parse_id(c, "an activity");
  const Token& rate = c.expect_word("<max>/<window>");
  auto slash = rate.text.find('/');
  if (slash == std::string::npos) Cursor::fail_at(rate, "<max>/<window>");
  std::string_view max_text = std::string_view(rate.text).substr(0, slash);
  std::size_t max = 0;
  auto [ptr, ec] =
      std::from_chars(max_text.data(), max_text.data() + max_text.size(), max);
  if (max_text.empty() || ec != std::errc{} ||
      ptr != max_text.data() + max_text.size()) {
    Cursor::fail_at(rate, "an integer count before '/'");
  }
  auto window = parse_duration(std::string_view(rate.text).substr(slash + 1));
  if (!window) Cursor::fail_at(rate, "a window duration after '/'");
  l.max_count = max;
  l.window = *window;
  c.expect_end("end of limit");
  return l;
}

// ---------------------------------------------------------------------------
// Policy lines

class PolicyParser {
 public:
  explicit PolicyParser(std::string_view file) : file_(file) {}

  ParseResult<PolicySet> run(std::string_view text) {
    for (const Line& line : split_lines(text)) {
      std::vector<Token> toks;
      try {
        toks = tokenize(line.text);
      } catch (const Failure& f) {
        errors_.push_back(to_error(f, file_, line.number));
        continue;
      }
      if (toks.empty()) continue;
      const bool indented =
          line.text.front() == ' ' || line.text.front() == '\t';
      Cursor c(std::move(toks), line.text.size());
      try {
        if (indented && rule_) {
          parse_clause(c);
        } else {
          close_rule();
          parse_top(c, line.number);
        }
      } catch (const Failure& f) {
        errors_.push_back(to_error(f, file_, line.number));
      }
    }
    close_rule();
    ParseResult<PolicySet> out;
    out.errors = std::move(errors_);
    if (out.errors.empty()) out.value = std::move(policy_);
    return out;
  }

 private:
  void close_rule() {
    if (!rule_) return;
    if (!has_allow_) {
      errors_.push_back(ParseError{rule_span_, "an 'allow' clause", "rule"});
    } else {
      policy_.rules.push_back(std::move(*rule_));
    }
    rule_.reset();
  }

  void parse_top(Cursor& c, std::size_t line) {
    const Token& kw = c.expect_word("device, subject, env, limit, rule or relation");
    if (kw.text == "device") {
      parse_device(c);
    } else if (kw.text == "subject") {
      parse_subject(c);
    } else if (kw.text == "env") {
      std::string name = c.expect_word("an env name").text;
      c.expect(Tok::Equal, "'='");
      AttributeValue v = parse_value(c);
      c.expect_end("end of env declaration");
      policy_.environment.emplace_back(std::move(name), std::move(v));
    } else if (kw.text == "limit") {
      policy_.limits.push_back(parse_limit_body(c));
    } else if (kw.text == "rule") {
      parse_rule_header(c, kw, line);
    } else if (kw.text == "relation") {
      parse_relation(c);
    } else {
      Cursor::fail_at(kw, "device, subject, env, limit, rule or relation");
    }
  }

  static void parse_attrs(Cursor& c, AttributeMap& attrs) {
    if (c.done()) c.fail("an attribute");
    while (!c.done()) {
      const Token& name = c.expect_word("an attribute name");
      c.expect(Tok::Equal, "'='");
      if (attrs.contains(name.text)) Cursor::fail_at(name, "a new attribute");
      attrs[name.text] = parse_value(c);
    }
  }

  void parse_device(Cursor& c) {
    DeviceObject d;
    d.id = parse_id(c, "a device id");
    std::set<std::string> seen;
    bool has_type = false;
    while (!c.done()) {
      const Token& key = c.expect_word("type, group, location, owner or attr");
      if (key.text == "attr") {
        parse_attrs(c, d.attributes);
        break;
      }
      if (!seen.insert(key.text).second) Cursor::fail_at(key, "a new key");
      c.expect(Tok::Equal, "'='");
      if (key.text == "type") {
        d.object_type = parse_id(c, "a type");
        has_type = true;
      } else if (key.text == "group") {
        do {
          d.groups.insert(parse_id(c, "a group"));
        } while (c.accept(Tok::Comma));
      } else if (key.text == "location") {
        d.location = parse_id(c, "a location");
      } else if (key.text == "owner") {
        d.owner = parse_id(c, "an owner");
      } else {
        Cursor::fail_at(key, "type, group, location, owner or attr");
      }
    }
    if (!has_type) c.fail("type=<id>");
    policy_.devices.push_back(std::move(d));
  }

  void parse_subject(Cursor& c) {
    Subject s;
    s.id = parse_id(c, "a subject id");
    bool has_kind = false;
    bool has_rel = false;
    while (!c.done()) {
      const Token& key = c.expect_word("kind, rel or attr");
      if (key.text == "attr") {
        parse_attrs(c, s.attributes);
        break;
      }
      if (key.text == "kind") {
        if (has_kind) Cursor::fail_at(key, "a single kind");
        c.expect(Tok::Equal, "'='");
        const Token& k = c.expect_word("user or device");
        if (k.text == "user") {
          s.kind = SubjectKind::User;
        } else if (k.text == "device") {
          s.kind = SubjectKind::Device;
        } else {
          Cursor::fail_at(k, "user or device");
        }
        has_kind = true;
      } else if (key.text == "rel") {
        if (has_rel) Cursor::fail_at(key, "a single rel list");
        has_rel = true;
        do {
          std::string name = c.expect_word("a relation name").text;
          c.expect(Tok::Arrow, "'->'");
          s.relations.insert({std::move(name), parse_id(c, "a relation target")});
        } while (c.peek_is(Tok::Word) && !c.peek_word("attr") &&
                 !c.peek_word("kind") && c.peek_is(Tok::Arrow, 1));
      } else {
        Cursor::fail_at(key, "kind, rel or attr");
      }
    }
    if (!has_kind) c.fail("kind=user|device");
    policy_.subjects.push_back(std::move(s));
  }

  void parse_rule_header(Cursor& c, const Token& kw, std::size_t line) {
    c.expect_keyword("on");
    const Token& obj = c.expect_word("a rule object pattern");
    Pattern object;
    if (obj.text.size() > 1 && obj.text.back() == ':') {
      Token stripped = obj;
      stripped.text.pop_back();
      object = pattern_from_word(stripped);
    } else {
      object = pattern_from_word(obj);
      const Token& colon = c.expect_word("':'");
      if (colon.text != ":") Cursor::fail_at(colon, "':'");
    }
    rule_.emplace();
    rule_->object = object;
    rule_span_ = SourceSpan{std::string(file_), line, kw.column, kw.length};
    has_allow_ = false;
    seen_clauses_.clear();
    if (!c.done()) parse_clause(c);
  }

  void parse_clause(Cursor& c) {
    const Token& kw = c.expect_word("allow, pre, cur, then, when or limit");
    const std::string k = kw.text;
    if (k == "limit") {
      rule_->limits.push_back(parse_limit_body(c));
      return;
    }
    std::string base = k;
    if (!base.empty() && base.back() == '*') base.pop_back();
    if (!seen_clauses_.insert(base).second) {
      Cursor::fail_at(kw, "a single '" + base + "' clause");
    }
    if (k == "allow") {
      rule_->op = parse_id(c, "an operation");
      c.expect_keyword("by");
      rule_->source = parse_pattern(c);
      c.expect_keyword("as");
      rule_->activity = parse_id(c, "an activity");
      c.expect_end("end of allow clause");
      has_allow_ = true;
    } else if (k == "pre") {
      rule_->pre = parse_full_expr(c, Phase::Pre);
    } else if (k == "cur" || k == "cur*") {
      rule_->cur = parse_full_expr(c, Phase::Current);
      rule_->cur_continuous = k == "cur*";
    } else if (k == "when" || k == "when*") {
      rule_->when = parse_full_expr(c, Phase::Current);
      rule_->when_continuous = k == "when*";
    } else if (k == "then") {
      rule_->obligations = parse_obligations(c);
      c.expect_end("';' or end of obligations");
    } else {
      Cursor::fail_at(kw, "allow, pre, cur, then, when or limit");
    }
  }

  void parse_relation(Cursor& c) {
    RelationDecl r;
    const Token& kind = c.expect_word("a relation kind");
    static const std::array<std::pair<std::string_view, RelationKind>, 7>
        kinds{{{"ordered", RelationKind::Ordered},
               {"concurrent", RelationKind::Concurrent},
               {"temporary", RelationKind::Temporary},
               {"precedence", RelationKind::Precedence},
               {"dependence", RelationKind::Dependence},
               {"conditional", RelationKind::Conditional},
               {"incompatible", RelationKind::Incompatible}}};
    auto hit = std::find_if(kinds.begin(), kinds.end(),
                            [&](const auto& p) { return p.first == kind.text; });
    if (hit == kinds.end()) Cursor::fail_at(kind, "a relation kind");
    r.kind = hit->second;
    r.a = parse_id(c, "an activity");
    r.b = parse_id(c, "an activity");
    bool has_scope = false;
    bool has_detail = false;
    std::set<std::string> seen;
    while (!c.done()) {
      const Token& key = c.expect_word("scope, window, when or detail");
      if (!seen.insert(key.text).second) Cursor::fail_at(key, "a new option");
      if (key.text == "scope") {
        c.expect(Tok::Equal, "'='");
        const Token& s = c.expect_word("same, different, any or same-location");
        if (s.text == "same") {
          r.scope = DeviceScope::Same;
        } else if (s.text == "different") {
          r.scope = DeviceScope::Different;
        } else if (s.text == "any") {
          r.scope = DeviceScope::Any;
        } else if (s.text == "same-location") {
          r.scope = DeviceScope::SameLocation;
        } else {
          Cursor::fail_at(s, "same, different, any or same-location");
        }
        has_scope = true;
      } else if (key.text == "window") {
        c.expect(Tok::Equal, "'='");
        r.window = parse_duration_token(c);
      } else if (key.text == "when") {
        r.guard = ExprParser(c, Phase::Current, "detail").parse();
      } else if (key.text == "detail") {
        r.detail = parse_detail(c, r, key);
        has_detail = true;
        c.expect_end("end of relation");
      } else {
        Cursor::fail_at(key, "scope, window, when or detail");
      }
    }
    if (!has_scope) c.fail("scope=same|different|any|same-location");
    if (!has_detail) r.detail = default_detail(r.kind, r.a);
    policy_.relations.push_back(std::move(r));
  }

  static bool parse_yes_no(Cursor& c) {
    const Token& t = c.expect_word("yes or no");
    if (t.text == "yes") return true;
    if (t.text == "no") return false;
    Cursor::fail_at(t, "yes or no");
  }

  static std::optional<EntityId> parse_on(Cursor& c) {
    if (!c.accept_word("on")) return std::nullopt;
    c.expect(Tok::Equal, "'='");
    return parse_id(c, "a device");
  }

  static RelationDetail parse_detail(Cursor& c, const RelationDecl& r,
                                     const Token& kw) {
    switch (r.kind) {
      case RelationKind::Ordered: {
        c.expect_keyword("first");
        c.expect(Tok::Equal, "'='");
        return OrderedDetail{parse_id(c, "an activity")};
      }
      case RelationKind::Concurrent: {
        ConcurrentDetail d;
        const Token& m = c.expect_word("must or may");
        if (m.text == "must") {
          d.must = true;
        } else if (m.text != "may") {
          Cursor::fail_at(m, "must or may");
        }
        d.on = parse_on(c);
        return d;
      }
      case RelationKind::Precedence: {
        PrecedenceDetail d;
        c.expect_keyword("winner");
        c.expect(Tok::Equal, "'='");
        d.winner = parse_id(c, "an activity");
        std::set<std::string> seen;
        while (!c.done()) {
          const Token& key = c.expect_word("loser or resume");
          if (!seen.insert(key.text).second) Cursor::fail_at(key, "a new key");
          c.expect(Tok::Equal, "'='");
          if (key.text == "loser") {
            const Token& e = c.expect_word("halt or abort");
            if (e.text == "halt") {
              d.effect = LoserEffect::Halt;
            } else if (e.text == "abort") {
              d.effect = LoserEffect::Abort;
            } else {
              Cursor::fail_at(e, "halt or abort");
            }
          } else if (key.text == "resume") {
            d.resume_after = parse_yes_no(c);
          } else {
            Cursor::fail_at(key, "loser or resume");
          }
        }
        return d;
      }
      case RelationKind::Dependence: {
        DependenceDetail d;
        const Token& m = c.expect_word("requires, parallel or after");
        if (m.text == "requires") {
          d.mode = DependenceMode::Requires;
        } else if (m.text == "parallel") {
          d.mode = DependenceMode::Parallel;
        } else if (m.text == "after") {
          d.mode = DependenceMode::After;
        } else {
          Cursor::fail_at(m, "requires, parallel or after");
        }
        d.on = parse_on(c);
        return d;
      }
      case RelationKind::Conditional:
        return ConditionalDetail{parse_obligations(c)};
      case RelationKind::Temporary:
      case RelationKind::Incompatible:
        break;
    }
    Cursor::fail_at(kw, "no detail for this relation kind");
  }

  std::string_view file_;
  PolicySet policy_;
  std::vector<ParseError> errors_;
  std::optional<ActivityRule> rule_;
  SourceSpan rule_span_;
  bool has_allow_ = false;
  std::set<std::string> seen_clauses_;
};

// ---------------------------------------------------------------------------
// Printing

std::string fmt_atom(const Atom& atom);

std::string fmt_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Leaf:
      return fmt_atom(*e.atom);
    case Expr::Kind::Not:
      return "!(" + fmt_expr(e.children.front()) + ")";
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const bool is_and = e.kind == Expr::Kind::And;
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        const Expr& ch = e.children[i];
        if (i) out += is_and ? " && " : " || ";
        const bool paren = ch.kind == e.kind ||
                           (is_and && ch.kind == Expr::Kind::Or);
        out += paren ? "(" + fmt_expr(ch) + ")" : fmt_expr(ch);
      }
      return out;
    }
  }
  return {};
}

std::string fmt_atom(const Atom& atom) {
  struct V {
    std::string operator()(const StateCondition& c) const {
      std::string out = c.negated ? "!" : "";
      out += to_string(c.activity) + "(" + to_string(c.object) + ", " +
             to_string(c.source) + ")";
      if (c.window) out += " within " + format_duration(*c.window);
      return out;
    }
    std::string operator()(const ValueComparison& v) const {
      return "value(" + v.name + ") " + std::string(to_string(v.op)) + " " +
             format_literal(v.literal);
    }
    std::string operator()(const LocationTest& l) const {
      return "location(" + to_string(l.object) + ") " +
             (l.equal ? "= " : "!= ") + l.location.str();
    }
    std::string operator()(const RelationTest& r) const {
      return "rel(" + r.relation + ", " + to_string(r.subject) + ", " +
             to_string(r.target) + ")";
    }
    std::string operator()(const TimeOfDayRange& t) const {
      return "time_in(" + format_duration(t.from) + ", " +
             format_duration(t.to) + ")";
    }
    std::string operator()(const RequesterTest& r) const {
      return "requester(" + to_string(r.subject) + ")";
    }
  };
  return std::visit(V{}, atom);
}

std::string fmt_obligations(const std::vector<ObligationAction>& os) {
  std::string out;
  for (std::size_t i = 0; i < os.size(); ++i) {
    if (i) out += "; ";
    out += format_obligation(os[i]);
  }
  return out;
}

std::string fmt_limit(const UsageLimit& l) {
  return std::string(to_string(l.scope)) + " " + l.activity.str() + " " +
         std::to_string(l.max_count) + "/" + format_duration(l.window);
}

void print_attrs(std::ostringstream& os, const AttributeMap& attrs) {
  if (attrs.empty()) return;
  os << " attr";
  for (const auto& [k, v] : attrs) os << ' ' << k << '=' << format_literal(v);
}

}  // namespace

std::string format_duration(Duration d) {
  static constexpr std::array<std::pair<Duration, char>, 4> units{
      {{604800, 'w'}, {86400, 'd'}, {3600, 'h'}, {60, 'm'}}};
  if (d != 0) {
    for (auto [size, unit] : units) {
      if (d % size == 0) return std::to_string(d / size) + unit;
    }
  }
  return std::to_string(d) + "s";
}

std::optional<Duration> parse_duration(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  Duration scale = 0;
  switch (text.back()) {
    case 's':
      scale = 1;
      break;
    case 'm':
      scale = 60;
      break;
    case 'h':
      scale = 3600;
      break;
    case 'd':
      scale = 86400;
      break;
    case 'w':
      scale = 604800;
      break;
    default:
      return std::nullopt;
  }
  std::string_view digits = text.substr(0, text.size() - 1);
  if (!std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  Duration n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  if (n > std::numeric_limits<Duration>::max() / scale) return std::nullopt;
  return n * scale;
}

std::string format_literal(const AttributeValue& v) {
  if (!std::holds_alternative<std::string>(v)) return to_string(v);
  const auto& s = std::get<std::string>(v);
  const bool bare =
      !s.empty() && s != "true" && s != "false" && !is_number_word(s) &&
      s.find("->") == std::string::npos &&
      std::all_of(s.begin(), s.end(), [](char c) {
        return is_word_char(static_cast<unsigned char>(c));
      });
  if (bare) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string format_expr(const Expr& e) { return fmt_expr(e); }

std::string format_obligation(const ObligationAction& o) {
  return std::string(to_string(o.kind)) + " " + o.activity.str() + "(" +
         to_string(o.object) + ")";
}

bool is_reserved_word(std::string_view word) {
  return is_context_atom(word) || word == "ANY" || word == "SUBJECT" ||
         word == "OBJECT" || word == "inactive" || word == "within";
}

ParseResult<PolicySet> parse_policy(std::string_view text,
                                    std::string_view file) {
  return PolicyParser(file).run(text);
}

std::string pretty_print(const PolicySet& p) {
  std::ostringstream os;
  for (const auto& d : p.devices) {
    os << "device " << d.id.str() << " type=" << d.object_type.str();
    if (!d.groups.empty()) {
      os << " group=";
      bool first = true;
      for (const auto& g : d.groups) {
        os << (first ? "" : ",") << g.str();
        first = false;
      }
    }
    if (d.location) os << " location=" << d.location->str();
    if (d.owner) os << " owner=" << d.owner->str();
    print_attrs(os, d.attributes);
    os << '\n';
  }
  for (const auto& s : p.subjects) {
    os << "subject " << s.id.str() << " kind=" << to_string(s.kind);
    if (!s.relations.empty()) {
      os << " rel";
      for (const auto& [name, target] : s.relations) {
        os << ' ' << name << "->" << target.str();
      }
    }
    print_attrs(os, s.attributes);
    os << '\n';
  }
  for (const auto& [name, value] : p.environment) {
    os << "env " << name << " = " << format_literal(value) << '\n';
  }
  for (const auto& l : p.limits) os << "limit " << fmt_limit(l) << '\n';

  for (const auto& r : p.rules) {
    os << "\nrule on " << to_string(r.object) << ":\n";
    os << "  allow " << r.op.str() << " by " << to_string(r.source) << " as "
       << r.activity.str() << '\n';
    if (r.pre) os << "  pre " << fmt_expr(*r.pre) << '\n';
    if (r.cur) {
      os << "  cur" << (r.cur_continuous ? "* " : " ") << fmt_expr(*r.cur)
         << '\n';
    }
    if (!r.obligations.empty()) {
      os << "  then " << fmt_obligations(r.obligations) << '\n';
    }
    if (r.when) {
      os << "  when" << (r.when_continuous ? "* " : " ") << fmt_expr(*r.when)
         << '\n';
    }
    for (const auto& l : r.limits) os << "  limit " << fmt_limit(l) << '\n';
  }

  if (!p.relations.empty()) os << '\n';
  for (const auto& r : p.relations) {
    os << "relation " << to_string(r.kind) << ' ' << r.a.str() << ' '
       << r.b.str() << " scope=" << to_string(r.scope);
    if (r.window) os << " window=" << format_duration(*r.window);
    if (r.guard) os << " when " << fmt_expr(*r.guard);
    std::visit(
        [&](const auto& d) {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, OrderedDetail>) {
            os << " detail first=" << d.first.str();
          } else if constexpr (std::is_same_v<D, ConcurrentDetail>) {
            os << " detail " << (d.must ? "must" : "may");
            if (d.on) os << " on=" << d.on->str();
          } else if constexpr (std::is_same_v<D, PrecedenceDetail>) {
            os << " detail winner=" << d.winner.str()
               << " loser=" << to_string(d.effect)
               << " resume=" << (d.resume_after ? "yes" : "no");
          } else if constexpr (std::is_same_v<D, DependenceDetail>) {
            os << " detail " << to_string(d.mode);
            if (d.on) os << " on=" << d.on->str();
          } else if constexpr (std::is_same_v<D, ConditionalDetail>) {
            if (!d.actions.empty()) {
              os << " detail " << fmt_obligations(d.actions);
            }
          }
        },
        r.detail);
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Scenarios

ParseResult<Scenario> parse_scenario(std::string_view text,
                                     std::string_view file) {
  Scenario sc;
  std::vector<ParseError> errors;
  Timestamp last_time = 0;
  std::optional<std::size_t> last_request;

  for (const Line& line : split_lines(text)) {
    try {
      std::vector<Token> toks = tokenize(line.text);
      if (toks.empty()) continue;
      Cursor c(std::move(toks), line.text.size());
      c.expect_keyword("at");
      const Token& time_tok = c.expect_word("a time in seconds");
      Timestamp time = 0;
      auto [ptr, ec] = std::from_chars(
          time_tok.text.data(), time_tok.text.data() + time_tok.text.size(),
          time);
      if (ec != std::errc{} || ptr != time_tok.text.data() + time_tok.text.size() ||
          time < 0) {
        Cursor::fail_at(time_tok, "a time in seconds");
      }
      if (time < last_time) {
        Cursor::fail_at(time_tok, "a time >= " + std::to_string(last_time) +
                                      " (UnsortedTime)");
      }
      const Token& kind = c.expect_word("request, env, event or expect");
      if (kind.text == "request") {
        RequestEvent r;
        r.subject = parse_id(c, "a subject");
        r.op = parse_id(c, "an operation");
        r.object = parse_id(c, "an object");
        r.activity = parse_id(c, "an activity");
        c.expect_end("end of request");
        last_request = sc.events.size();
        sc.events.push_back({time, std::move(r)});
      } else if (kind.text == "env") {
        EnvEvent e;
        e.name = c.expect_word("an env name").text;
        c.expect(Tok::Equal, "'='");
        e.value = parse_value(c);
        c.expect_end("end of env update");
        sc.events.push_back({time, std::move(e)});
      } else if (kind.text == "event") {
        DeviceEvent e;
        e.object = parse_id(c, "an object");
        e.activity = parse_id(c, "an activity");
        const Token& what = c.expect_word("start or stop");
        if (what.text == "start") {
          e.start = true;
        } else if (what.text == "stop") {
          e.start = false;
        } else {
          Cursor::fail_at(what, "start or stop");
        }
        c.expect_end("end of event");
        sc.events.push_back({time, std::move(e)});
      } else if (kind.text == "expect") {
        const Token& what = c.expect_word("permit or deny[:<reason>]");
        Expectation ex;
        if (what.text == "permit") {
          ex.permit = true;
        } else if (what.text == "deny") {
          ex.permit = false;
        } else if (what.text.rfind("deny:", 0) == 0) {
          ex.permit = false;
          ex.reason = parse_deny_reason(std::string_view(what.text).substr(5));
          if (!ex.reason) Cursor::fail_at(what, "a deny reason code");
        } else {
          Cursor::fail_at(what, "permit or deny[:<reason>]");
        }
        c.expect_end("end of expectation");
        if (!last_request) Cursor::fail_at(kind, "a preceding request");
        if (sc.expectations.contains(*last_request)) {
          Cursor::fail_at(kind, "one expectation per request");
        }
        sc.expectations[*last_request] = ex;
      } else {
        Cursor::fail_at(kind, "request, env, event or expect");
      }
      last_time = time;
    } catch (const Failure& f) {
      errors.push_back(to_error(f, file, line.number));
    }
  }
  ParseResult<Scenario> out;
  out.errors = std::move(errors);
  if (out.errors.empty()) out.value = std::move(sc);
  return out;
}

std::string pretty_print(const Scenario& sc) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const TimedEvent& te = sc.events[i];
    os << "at " << te.time << ' ';
    std::visit(
        [&](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, RequestEvent>) {
            os << "request " << e.subject.str() << ' ' << e.op.str() << ' '
               << e.object.str() << ' ' << e.activity.str();
          } else if constexpr (std::is_same_v<E, EnvEvent>) {
            os << "env " << e.name << '=' << format_literal(e.value);
          } else {
            os << "event " << e.object.str() << ' ' << e.activity.str()
               << (e.start ? " start" : " stop");
          }
        },
        te.event);
    os << '\n';
    if (auto it = sc.expectations.find(i); it != sc.expectations.end()) {
      os << "at " << te.time << " expect " << to_string(it->second) << '\n';
    }
  }
  return os.str();
}

}  // namespace acac
