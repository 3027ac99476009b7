#include "excal/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "excal/errors.hpp"

namespace excal {

Expr Expr::make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr Expr::number(double c) {
  if (c == 0.0) c = 0.0;  // drop the sign of -0
  if (c < 0.0) return -number(-c);
  Node n{Kind::Number};
  n.number = c;
  return make(std::move(n));
}

Expr Expr::variable(int index, std::string name) {
  Node n{Kind::Variable};
  n.var = index;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr Expr::call(std::string fn, std::vector<Expr> args) {
  Node n{Kind::Call};
  n.name = std::move(fn);
  n.args = std::move(args);
  return make(std::move(n));
}

namespace {

Expr::Node binary(Expr::Kind k, const Expr& a, const Expr& b) {
  Expr::Node n{k};
  n.args = {a, b};
  return n;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(binary(Expr::Kind::Add, a, b)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(binary(Expr::Kind::Sub, a, b)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(binary(Expr::Kind::Mul, a, b)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(binary(Expr::Kind::Div, a, b)); }
Expr Expr::power(const Expr& a, const Expr& b) { return make(binary(Kind::Pow, a, b)); }
Expr operator-(const Expr& a) {
  Expr::Node n{Expr::Kind::Neg};
  n.args = {a};
  return Expr::make(std::move(n));
}

bool Expr::is_constant() const {
  if (node_->kind == Kind::Variable) return false;
  for (const auto& a : node_->args) {
    if (!a.is_constant()) return false;
  }
  return true;
}

bool Expr::is_zero_literal() const { return node_->kind == Kind::Number && node_->number == 0.0; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.var != y.var || x.name != y.name || x.args.size() != y.args.size()) {
    return false;
  }
  if (x.number != y.number && !(std::isnan(x.number) && std::isnan(y.number))) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!(x.args[i] == y.args[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parser

class ExprParser {
 public:
  ExprParser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  Expr parse() {
    skip_ws();
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(pos_, msg); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool at_end() const { return pos_ >= src_.size(); }

  // Accepts ASCII '-' and U+2212 MINUS SIGN.
  bool eat_minus() {
    if (!at_end() && src_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool eat(char c) {
    if (!at_end() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr finish(Expr::Node n, std::size_t begin) {
    n.begin = begin;
    n.end = pos_;
    return Expr::make(std::move(n));
  }

  Expr expr() {
    std::size_t begin = pos_;
    Expr lhs = term();
    for (;;) {
      skip_ws();
      Expr::Kind k;
      if (eat('+')) {
        k = Expr::Kind::Add;
      } else if (eat_minus()) {
        k = Expr::Kind::Sub;
      } else {
        return lhs;
      }
      skip_ws();
      Expr rhs = term();
      lhs = finish(binary(k, lhs, rhs), begin);
    }
  }

  Expr term() {
    std::size_t begin = pos_;
    Expr lhs = unary();
    for (;;) {
      skip_ws();
      Expr::Kind k;
      if (eat('*')) {
        k = Expr::Kind::Mul;
      } else if (eat('/')) {
        k = Expr::Kind::Div;
      } else {
        return lhs;
      }
      skip_ws();
      Expr rhs = unary();
      lhs = finish(binary(k, lhs, rhs), begin);
    }
  }

  Expr unary() {
    std::size_t begin = pos_;
    if (eat_minus()) {
      skip_ws();
      Expr inner = unary();
      Expr::Node n{Expr::Kind::Neg};
      n.args = {inner};
      return finish(std::move(n), begin);
    }
    return power();
  }

  Expr power() {
    std::size_t begin = pos_;
    Expr base = atom();
    std::size_t save = pos_;
    skip_ws();
    if (eat('^')) {
      skip_ws();
      Expr exponent = unary();
      return finish(binary(Expr::Kind::Pow, base, exponent), begin);
    }
    pos_ = save;
    return base;
  }

  Expr atom() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (eat('(')) {
      skip_ws();
      Expr inner = expr();
      skip_ws();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number_literal() {
    std::size_t begin = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (!at_end() && src_[pos_] == '.') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (!at_end() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        pos_ = save;  // not an exponent; let the caller see the identifier
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    std::string_view text = src_.substr(begin, pos_ - begin);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      pos_ = begin;
      fail("malformed number '" + std::string(text) + "'");
    }
    Expr::Node n{Expr::Kind::Number};
    n.number = v;
    return finish(std::move(n), begin);
  }

  Expr identifier() {
    std::size_t begin = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(src_.substr(begin, pos_ - begin));
    std::size_t after = pos_;
    skip_ws();
    if (!at_end() && src_[pos_] == '(') {
      int arity = -1;
      if (name == "sin" || name == "cos" || name == "tan" || name == "exp" || name == "log" ||
          name == "sqrt") {
        arity = 1;
      } else if (name == "pow") {
        arity = 2;
      } else {
        throw UnknownIdentifier(name);
      }
      ++pos_;
      std::vector<Expr> args;
      skip_ws();
      if (!eat(')')) {
        for (;;) {
          skip_ws();
          args.push_back(expr());
          skip_ws();
          if (eat(')')) break;
          if (!eat(',')) fail("expected ',' or ')'");
        }
      }
      if (static_cast<int>(args.size()) != arity) {
        throw ArityError(name + " expects " + std::to_string(arity) + " argument(s), got " +
                         std::to_string(args.size()));
      }
      Expr::Node n{Expr::Kind::Call};
      n.name = name;
      n.args = std::move(args);
      return finish(std::move(n), begin);
    }
    pos_ = after;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        Expr::Node n{Expr::Kind::Variable};
        n.var = static_cast<int>(i);
        n.name = name;
        return finish(std::move(n), begin);
      }
    }
    if (name == "pi" || name == "e") {
      Expr::Node n{Expr::Kind::Constant};
      n.name = name;
      n.number = name == "pi" ? std::numbers::pi : std::numbers::e;
      return finish(std::move(n), begin);
    }
    throw UnknownIdentifier(name);
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

Expr parse_expr(std::string_view src, std::span<const std::string> vars) {
  return ExprParser(src, vars).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::string span_note(const Expr& e) {
  const auto& n = e.node();
  std::string s = " in '" + to_string(e) + "'";
  if (n.end > n.begin) {
    s += " (bytes " + std::to_string(n.begin) + ".." + std::to_string(n.end) + ")";
  }
  return s;
}

template <class F>
Jet annotated(const Expr& e, F&& f) {
  try {
    return f();
  } catch (const DivisionByZeroAtPoint& err) {
    throw DivisionByZeroAtPoint(err.what() + span_note(e));
  } catch (const DomainError& err) {
    throw DomainError(err.what() + span_note(e));
  }
}

Jet eval_rec(const Expr& e, std::span<const double> p, int order) {
  const auto& n = e.node();
  const int nv = static_cast<int>(p.size());
  switch (n.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Constant:
      return Jet::constant(n.number, nv, order);
    case Expr::Kind::Variable:
      if (n.var >= nv) {
        throw IndexOutOfRange("variable '" + n.name + "' outside point of dimension " +
                              std::to_string(nv));
      }
      return Jet::variable(p, n.var, order);
    case Expr::Kind::Add:
      return eval_rec(n.args[0], p, order) + eval_rec(n.args[1], p, order);
    case Expr::Kind::Sub:
      return eval_rec(n.args[0], p, order) - eval_rec(n.args[1], p, order);
    case Expr::Kind::Mul:
      return eval_rec(n.args[0], p, order) * eval_rec(n.args[1], p, order);
    case Expr::Kind::Div: {
      Jet a = eval_rec(n.args[0], p, order);
      Jet b = eval_rec(n.args[1], p, order);
      return annotated(e, [&] { return a / b; });
    }
    case Expr::Kind::Neg:
      return -eval_rec(n.args[0], p, order);
    case Expr::Kind::Pow: {
      Jet a = eval_rec(n.args[0], p, order);
      const Expr& ex = n.args[1];
      if (ex.is_constant()) {
        double r = eval_rec(ex, p, 0).value();
        return annotated(e, [&] { return pow(a, r); });
      }
      Jet b = eval_rec(ex, p, order);
      return annotated(e, [&] { return pow(a, b); });
    }
    case Expr::Kind::Call: {
      if (n.name == "pow") {
        return eval_rec(Expr::power(n.args[0], n.args[1]), p, order);
      }
      Jet a = eval_rec(n.args[0], p, order);
      JetFn fn;
      if (n.name == "sin") fn = JetFn::Sin;
      else if (n.name == "cos") fn = JetFn::Cos;
      else if (n.name == "tan") fn = JetFn::Tan;
      else if (n.name == "exp") fn = JetFn::Exp;
      else if (n.name == "log") fn = JetFn::Log;
      else if (n.name == "sqrt") fn = JetFn::Sqrt;
      else throw UnknownIdentifier(n.name);
      return annotated(e, [&] { return apply(fn, a); });
    }
  }
  throw UnknownIdentifier("bad expression node");
}

}  // namespace

Jet eval_jet(const Expr& e, std::span<const double> point, int order) {
  if (!e.valid()) throw UnknownIdentifier("empty expression");
  return eval_rec(e, point, order);
}

double eval_value(const Expr& e, std::span<const double> point) {
  return eval_jet(e, point, 0).value();
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

// Binding strength used to decide where parentheses are needed.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    case Expr::Kind::Number: return e.node().number < 0 ? 3 : 5;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  const auto& n = e.node();
  switch (n.kind) {
    case Expr::Kind::Number: out += format_number(n.number); return;
    case Expr::Kind::Variable:
    case Expr::Kind::Constant: out += n.name; return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      print_wrapped(n.args[0], precedence(n.args[0]) < 1, out);
      out += n.kind == Expr::Kind::Add ? " + " : " - ";
      print_wrapped(n.args[1], precedence(n.args[1]) <= 1, out);
      return;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      print_wrapped(n.args[0], precedence(n.args[0]) < 2, out);
      out += n.kind == Expr::Kind::Mul ? "*" : "/";
      print_wrapped(n.args[1], precedence(n.args[1]) <= 2, out);
      return;
    case Expr::Kind::Neg:
      out += '-';
      print_wrapped(n.args[0], precedence(n.args[0]) <= 2, out);
      return;
    case Expr::Kind::Pow:
      print_wrapped(n.args[0], precedence(n.args[0]) <= 4, out);
      out += '^';
      print_wrapped(n.args[1], precedence(n.args[1]) <= 2, out);
      return;
    case Expr::Kind::Call:
      out += n.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(n.args[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  if (!e.valid()) return "";
  std::string out;
  print(e, out);
  return out;
}

}  // namespace excal
