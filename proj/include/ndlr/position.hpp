#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ndlr/expr.hpp"

namespace ndlr {

enum class Sel : std::uint8_t {
  AppFun,
  AppArg,
  Scrutinee,
  Alt,      // index = alternative
  Binding,  // binder = bound name
  LetBody,
  LamBody,
  ConArg,   // index = argument
  ChoiceLeft,
  ChoiceRight,
};

struct PathStep {
  Sel sel;
  std::size_t index = 0;
  std::string binder;

  bool operator==(const PathStep&) const = default;
};

/// Path of child selectors from the root; the empty path is the root.
using Position = std::vector<PathStep>;

class InvalidPosition : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

PathStep app_fun();
PathStep app_arg();
PathStep scrutinee();
PathStep alt(std::size_t i);
PathStep binding(std::string name);
PathStep let_body();
PathStep lam_body();
PathStep con_arg(std::size_t i);
PathStep choice_left();
PathStep choice_right();

Position extend(Position p, PathStep s);
bool is_prefix(const Position& prefix, const Position& p);

/// Child reached through one selector; throws InvalidPosition.
Expr child(const Expr& e, const PathStep& s);
Expr subterm(const Expr& e, const Position& p);
bool valid_position(const Expr& e, const Position& p);
/// Rebuilds the spine to `p` with `replacement` plugged in.
Expr replace(const Expr& e, const Position& p, const Expr& replacement);

/// Visits every position in pre-order (node before its children).
void for_each_position(const Expr& e,
                       const std::function<void(const Position&, const Expr&)>& f);

/// Dot-separated selectors, e.g. `letB(x1).appF`; the root prints as `ε`.
std::string to_string(const Position& p);
Position parse_position(std::string_view text);

}  // namespace ndlr
