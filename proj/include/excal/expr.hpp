#pragma once

// Scalar expression language for metric entries, structure tensors and form
// coefficients.
//
// Grammar (operators by increasing precedence):
//
//   expr  := term (("+" | "-") term)*
//   term  := unary (("*" | "/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?
//   atom  := number | ident | ident "(" args ")" | "(" expr ")"
//
// Identifiers are the declared coordinate names, the constants `pi` and `e`,
// and the functions sin cos tan exp log sqrt (one argument) and pow (two).

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "excal/jet.hpp"

namespace excal {

class Expr {
 public:
  enum class Kind { Number, Variable, Constant, Add, Sub, Mul, Div, Pow, Neg, Call };

  struct Node {
    Kind kind;
    double number = 0.0;       // Number, Constant
    int var = -1;              // Variable
    std::string name;          // Variable, Constant, Call
    std::vector<Expr> args;    // operands / call arguments
    std::size_t begin = 0, end = 0;  // byte span in the source, if parsed
  };

  Expr() = default;

  static Expr number(double c);
  static Expr variable(int index, std::string name);
  static Expr call(std::string fn, std::vector<Expr> args);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  static Expr power(const Expr& base, const Expr& exponent);

  bool valid() const { return node_ != nullptr; }
  const Node& node() const { return *node_; }
  Kind kind() const { return node_->kind; }
  /// True when the tree references no coordinate variable.
  bool is_constant() const;
  /// Literal zero (as built by `number(0)` or parsed "0").
  bool is_zero_literal() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Node n);
  friend class ExprParser;

  std::shared_ptr<const Node> node_;
};

/// Parses `src` with the given coordinate names. Throws SyntaxError,
/// UnknownIdentifier or ArityError.
Expr parse_expr(std::string_view src, std::span<const std::string> vars);

/// Jet of the expression at `point`, truncated at `order`. Evaluation errors
/// (DomainError, DivisionByZeroAtPoint) carry the offending source span.
Jet eval_jet(const Expr& e, std::span<const double> point, int order);
double eval_value(const Expr& e, std::span<const double> point);

/// Canonical text form; parse(to_string(e)) reproduces `e` structurally.
std::string to_string(const Expr& e);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

}  // namespace excal
