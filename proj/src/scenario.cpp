#include "acac/scenario.hpp"

#include <array>

namespace acac {
namespace {

constexpr std::array<std::pair<DenyReason, std::string_view>, 10> kReasons{{
    {DenyReason::NoMatchingRule, "no-matching-rule"},
    {DenyReason::PreFailed, "pre-failed"},
    {DenyReason::CurFailed, "cur-failed"},
    {DenyReason::ContextFailed, "context-failed"},
    {DenyReason::LimitExceeded, "limit-exceeded"},
    {DenyReason::RelationIncompatible, "relation-incompatible"},
    {DenyReason::RelationOrdered, "relation-ordered"},
    {DenyReason::RelationDependence, "relation-dependence"},
    {DenyReason::RelationPrecedence, "relation-precedence"},
    {DenyReason::ObligationFailed, "obligation-failed"},
}};

}  // namespace

std::string_view to_string(DenyReason r) {
  for (const auto& [reason, code] : kReasons) {
    if (reason == r) return code;
  }
  return "?";
}

std::optional<DenyReason> parse_deny_reason(std::string_view code) {
  for (const auto& [reason, text] : kReasons) {
    if (text == code) return reason;
  }
  return std::nullopt;
}

std::string to_string(const Expectation& e) {
  if (e.permit) return "permit";
  if (!e.reason) return "deny";
  return "deny:" + std::string(to_string(*e.reason));
}

}  // namespace acac
