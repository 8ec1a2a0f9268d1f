#ifndef PLQN_EXPR_HPP
#define PLQN_EXPR_HPP

#include <optional>
#include <string>
#include <vector>

#include "plqn/types.hpp"

namespace plqn {

struct Expr {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };
  Kind kind = Kind::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var: 0-based variable; Pow: integer exponent
  std::vector<Expr> args;

  bool operator==(const Expr&) const = default;
};

/// Parses one component. Variables are x1..xn. Throws ParseError with a position.
Expr parse_expr(const std::string& text, int n);

/// Fully parenthesized text that parses back to the same tree.
std::string to_string(const Expr& e);

double eval_expr(const Expr& e, const Vec& x);

/// The smooth map c : R^n -> R^m.
struct SmoothMap {
  int n = 0;
  std::vector<Expr> components;

  int m() const { return static_cast<int>(components.size()); }
};

SmoothMap parse_map(const std::vector<std::string>& texts, int n);

struct MapEval {
  Vec value;
  Mat jacobian;
  std::optional<Mat> weighted_hessian;  // sum_i y_i Hess c_i, present when y was given
};

/// Value, Jacobian and (if y is given) the weighted Hessian, by forward-over-forward AD.
/// Domain failures throw DomainError naming the component.
MapEval evaluate_map(const SmoothMap& c, const Vec& x, const Vec* y = nullptr);

Vec map_value(const SmoothMap& c, const Vec& x);
Mat map_jacobian(const SmoothMap& c, const Vec& x);
Mat weighted_hessian(const SmoothMap& c, const Vec& x, const Vec& y);

}  // namespace plqn

#endif  // PLQN_EXPR_HPP
