#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace nld {

/// A compiled arithmetic expression over the variables x, y and theta.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'e' | variable | call | '(' expr ')'
///   call    := ('abs' | 'exp' | 'ln' | 'sqrt' | 'cos' | 'sin') '(' expr ')'
///            | 'indicator' '(' expr ',' expr ',' expr ')'
///
/// `theta` (or `θ`) is an alias of `x`. indicator(lo, hi, e) is 1 when
/// lo < e < hi and 0 otherwise. Parse failures throw Error(invalid_argument)
/// with the byte offset of the problem.
class Expression {
 public:
  static Expression parse(std::string_view source);

  double operator()(double x, double y = 0.0) const;

  const std::string& source() const noexcept { return source_; }
  bool uses_y() const noexcept { return uses_y_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string source, bool uses_y)
      : root_(std::move(root)), source_(std::move(source)), uses_y_(uses_y) {}

  std::shared_ptr<const Node> root_;
  std::string source_;
  bool uses_y_ = false;
};

}  // namespace nld
