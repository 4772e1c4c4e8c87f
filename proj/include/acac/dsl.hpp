#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acac/policy.hpp"
#include "acac/scenario.hpp"

namespace acac {

/// 1-based position of an offending token; length is at least 1.
struct SourceSpan {
  std::string file;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 1;

  bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
  SourceSpan span;
  std::string expected;
  std::string found;

  /// `file:line:col: expected <expected>, found '<found>'`
  std::string to_string() const;

  bool operator==(const ParseError&) const = default;
};

template <class T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseError> errors;

  bool ok() const noexcept { return value.has_value(); }
};

/// Parses a `.acac` policy. Never throws; on failure `errors` is non-empty.
ParseResult<PolicySet> parse_policy(std::string_view text,
                                    std::string_view file = "<input>");

/// Parses a `.acsc` scenario. Times must be non-decreasing.
ParseResult<Scenario> parse_scenario(std::string_view text,
                                     std::string_view file = "<input>");

/// Canonical text; parse_policy(pretty_print(p)) == p.
std::string pretty_print(const PolicySet& policy);
std::string pretty_print(const Scenario& scenario);

std::string format_duration(Duration d);
std::optional<Duration> parse_duration(std::string_view text);
std::string format_literal(const AttributeValue& v);
std::string format_expr(const Expr& e);
std::string format_obligation(const ObligationAction& o);

/// Words with a fixed meaning in expressions; not usable as activity names.
bool is_reserved_word(std::string_view word);

}  // namespace acac
