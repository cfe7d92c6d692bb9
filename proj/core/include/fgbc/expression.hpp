#pragma once

// Small arithmetic expression language for user-supplied vector fields.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Variables: u, v (aliases x1, x2). Constants: pi, e. Functions: sin, cos,
// tan, exp, log, sqrt, abs.

#include <memory>
#include <string>

#include "fgbc/dual.hpp"

namespace fgbc {

class Expression {
 public:
  /// Throws a validation error with the offending column on bad input.
  static Expression parse(const std::string& text);

  double operator()(double u, double v) const;
  ad::Dual<double, 2> operator()(const ad::Dual<double, 2>& u, const ad::Dual<double, 2>& v) const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fgbc
