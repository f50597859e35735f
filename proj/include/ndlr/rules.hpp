#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ndlr/expr.hpp"
#include "ndlr/position.hpp"

namespace ndlr {

/// Base calculus rules followed by the extra transformations.
enum class Rule : std::uint8_t {
  lbeta,
  cpn,
  llet,
  lapp,
  lcase,
  case_,
  ndl,
  ndr,
  ldel,
  ldelcyc1,
  ldelcyc2,
  lcv,
  cpt,
  cpd,
  ucp,
};

std::string_view rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);
const std::vector<Rule>& base_rules();
const std::vector<Rule>& all_rules();

/// Named groups of rules: lll (alias ll), nd, cp, ldelcyc.
std::optional<std::vector<Rule>> family_members(std::string_view family);
bool in_family(Rule r, std::string_view family);
/// Rule names and family names both resolve; unknown names yield nullopt.
std::optional<std::vector<Rule>> resolve_label(std::string_view name);

/// Side condition or shape violated; the message is meant for users.
class RuleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A rule instance in a term.  `pos` is the rule's handle:
///   lbeta, lapp: the application;  lcase, case: the case expression;
///   ndl, ndr: the choice;  llet: the inner letrec;
///   cpn, cpt, cpd, lcv: the variable occurrence being replaced;
///   ldel, ucp: the removed binding (letrec position plus letB(x));
///   ldelcyc1, ldelcyc2: the letrec, with the dropped binders in `group`.
struct Redex {
  Rule rule;
  Position pos;
  std::vector<std::string> group;

  bool operator==(const Redex&) const = default;
};

/// Position of the smallest subterm the rewrite touches.
Position redex_root(const Expr& e, const Redex& r);

Expr apply(const Expr& e, const Redex& r);

Expr apply_lbeta(const Expr& e, const Position& pos);
Expr apply_lapp(const Expr& e, const Position& pos);
Expr apply_lcase(const Expr& e, const Position& pos);
Expr apply_llet(const Expr& e, const Position& pos);
/// Constructor scrutinee, or a constructor assembled through letrec bindings.
Expr apply_case(const Expr& e, const Position& pos);
Expr apply_case_direct(const Expr& e, const Position& pos);
Expr apply_case_chain(const Expr& e, const Position& pos);
Expr apply_nd(const Expr& e, const Position& pos, bool left);
Expr apply_cpn(const Expr& e, const Position& occurrence);
/// Returns the result together with its subtype (cpt or cpd).
std::pair<Expr, Rule> apply_cp(const Expr& e, const Position& occurrence);
Expr apply_lcv(const Expr& e, const Position& occurrence);
Expr apply_ldel(const Expr& e, const Position& binding_pos);
Expr apply_ldelcyc(const Expr& e, const Position& letrec_pos, const std::vector<std::string>& group);
Expr apply_ucp(const Expr& e, const Position& binding_pos);

/// Whether the case expression at `pos` is a chained case redex.
bool case_chain_applicable(const Expr& e, const Position& pos);

/// Every rule instance in `e`, in pre-order of handles.
std::vector<Redex> find_redexes(const Expr& e);
std::vector<Redex> find_redexes(const Expr& e, const std::vector<Rule>& rules);

/// Position of the letrec binding `name` that encloses `occurrence`, if any.
std::optional<Position> binding_letrec(const Expr& e, const Position& occurrence,
                                       const std::string& name);
/// Positions of the free occurrences of `name` in `e`.
std::vector<Position> free_occurrences(const Expr& e, const std::string& name);

}  // namespace ndlr
