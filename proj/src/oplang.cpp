#include "excal/oplang.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include "excal/expr.hpp"

namespace excal {

namespace {

const std::set<std::string, std::less<>>& builtin_names() {
  static const std::set<std::string, std::less<>> names{
      "d",      "delta",  "delta_rev", "eps",      "i",        "lie",      "nabla", "comm",   "acomm",
      "apply",  "comp",   "wedge",     "wedgev",   "tr",       "sharp",    "flat",  "nablaF", "diamond",
      "diamond0", "diamond1", "diamond2", "dnabla", "lieg",    "lieg_printed", "curv", "nijenhuis",
      "zero",   "zerov",  "Id",        "add",      "sub",      "neg",      "scale"};
  return names;
}

struct Arg {
  OpPtr e;
  std::size_t begin, end;
  bool literal = false;  // a bare number
};

std::string span_note(std::string_view text, std::size_t b, std::size_t e) {
  return " in '" + std::string(text.substr(b, e - b)) + "' (bytes " + std::to_string(b) + ".." +
         std::to_string(e) + ")";
}

template <class F>
OpPtr annotate(std::string_view text, std::size_t b, std::size_t e, F&& f) {
  try {
    return f();
  } catch (const TypeError& err) {
    throw TypeError(err.what() + span_note(text, b, e));
  } catch (const DegreeError& err) {
    throw DegreeError(err.what() + span_note(text, b, e));
  } catch (const ArityError& err) {
    throw ArityError(err.what() + span_note(text, b, e));
  }
}

class Parser {
 public:
  Parser(std::string_view text, const OpEnv& env) : text_(text), env_(env) {}

  OpPtr program() {
    for (;;) {
      skip();
      const std::size_t save = pos_;
      if (!ident_start()) break;
      std::string name = ident();
      skip();
      if (!text_.substr(pos_).starts_with(":=")) {
        pos_ = save;
        break;
      }
      pos_ += 2;
      if (is_builtin_name(name)) throw SyntaxError(save, "cannot redefine builtin '" + name + "'");
      Arg a = expr();
      skip();
      if (!eat(';')) throw SyntaxError(pos_, "expected ';' after definition of '" + name + "'");
      macros_[name] = a.e;
    }
    Arg a = expr();
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "unexpected trailing input");
    return a.e;
  }

 private:
  bool ident_start() const {
    return pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  std::string ident() {
    const std::size_t b = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(b, pos_ - b));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Arg expr() {
    skip();
    const std::size_t b = pos_;
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "expected an expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '+') {
      double v = 0;
      const char* first = text_.data() + pos_ + (c == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
      if (ec != std::errc() || !std::isfinite(v)) throw SyntaxError(b, "malformed number");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      return {ops::number(v), b, pos_, true};
    }
    if (!ident_start()) throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
    std::string name = ident();
    skip();
    std::vector<Arg> args;
    bool call = false;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      call = true;
      ++pos_;
      skip();
      if (!eat(')')) {
        do {
          args.push_back(expr());
        } while (eat(','));
        if (!eat(')')) throw SyntaxError(pos_, "expected ',' or ')'");
      }
    }
    const std::size_t e = pos_;
    if (is_builtin_name(name)) {
      return {annotate(text_, b, e, [&] { return builtin(name, call, args); }), b, e};
    }
    if (call) {
      throw TypeError("'" + name + "' is not an operator and takes no arguments" + span_note(text_, b, e));
    }
    if (auto it = macros_.find(name); it != macros_.end()) return {it->second, b, e};
    if (const OpPtr* x = env_.find(name)) return {*x, b, e};
    throw UnknownIdentifier("unknown name '" + name + "'" + span_note(text_, b, e));
  }

  static void arity(const std::string& name, const std::vector<Arg>& args, std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + ".." + std::to_string(hi);
      throw ArityError("'" + name + "' takes " + want + " argument(s), got " + std::to_string(args.size()));
    }
  }

  static int integer(const std::string& name, const Arg& a) {
    const double v = a.e->number;
    if (!a.literal || v != std::floor(v)) throw TypeError("'" + name + "' needs an integer literal");
    return static_cast<int>(v);
  }

  OpPtr builtin(const std::string& name, bool call, const std::vector<Arg>& args) {
    auto A = [&](std::size_t i) { return args[i].e; };
    if (!call) {
      if (name == "d") return ops::op_d();
      if (name == "delta") return ops::op_delta();
      if (name == "delta_rev") return ops::op_delta_rev();
      if (name == "Id") return ops::identity();
      throw ArityError("'" + name + "' needs arguments");
    }
    if (name == "Id") throw ArityError("'Id' takes no arguments");
    if (name == "d" || name == "delta" || name == "delta_rev") {
      arity(name, args, 0, 1);
      if (args.empty()) return builtin(name, false, args);
      if (name == "d") return ops::d(A(0));
      return name == "delta" ? ops::delta(A(0)) : ops::delta_rev(A(0));
    }
    if (name == "eps") {
      arity(name, args, 1, 2);
      return args.size() == 1 ? ops::op_eps(A(0)) : ops::wedge(A(0), A(1));
    }
    if (name == "i") {
      arity(name, args, 1, 2);
      return args.size() == 1 ? ops::op_interior(A(0)) : ops::interior(A(0), A(1));
    }
    if (name == "lie") {
      arity(name, args, 1, 2);
      return args.size() == 1 ? ops::op_lie(A(0)) : ops::lie(A(0), A(1));
    }
    if (name == "nabla") {
      arity(name, args, 1, 2);
      return args.size() == 1 ? ops::op_nabla(A(0)) : ops::nabla(A(0), A(1));
    }
    if (name == "comm" || name == "acomm") {
      arity(name, args, 2, 3);
      OpPtr op = name == "comm" ? ops::comm(A(0), A(1)) : ops::acomm(A(0), A(1));
      return args.size() == 2 ? op : ops::apply(op, A(2));
    }
    if (name == "apply") {
      arity(name, args, 2, 2);
      return ops::apply(A(0), A(1));
    }
    if (name == "comp") {
      arity(name, args, 2, 2);
      return ops::compose(A(0), A(1));
    }
    if (name == "wedge" || name == "wedgev") {
      arity(name, args, 2, 2);
      if (name == "wedgev" && !A(1)->is_vec()) throw TypeError("'wedgev' needs a vector-valued second argument");
      return ops::wedge(A(0), A(1));
    }
    if (name == "zero" || name == "zerov") {
      arity(name, args, 1, 1);
      const int k = integer(name, args[0]);
      return name == "zero" ? ops::zero_form(k) : ops::zero_vec(k);
    }
    if (name == "add") {
      if (args.size() < 2) arity(name, args, 2, 2);
      OpPtr acc = A(0);
      for (std::size_t i = 1; i < args.size(); ++i) acc = ops::add(acc, A(i));
      return acc;
    }
    if (name == "sub") {
      arity(name, args, 2, 2);
      return ops::sub(A(0), A(1));
    }
    if (name == "scale") {
      arity(name, args, 2, 2);
      if (!args[0].literal) throw TypeError("'scale' needs a number literal as its first argument");
      return ops::scale(A(0)->number, A(1));
    }
    arity(name, args, 1, 1);
    const OpPtr x = A(0);
    if (name == "neg") return ops::neg(x);
    if (name == "tr") return ops::trace(x);
    if (name == "sharp") return ops::sharp(x);
    if (name == "flat") return ops::flat(x);
    if (name == "nablaF") return ops::nabla_form(x);
    if (name == "diamond" || name == "diamond0") return ops::diamond(x, 0);
    if (name == "diamond1") return ops::diamond(x, 1);
    if (name == "diamond2") return ops::diamond(x, 2);
    if (name == "dnabla") return ops::d_nabla(x);
    if (name == "lieg") return ops::lie_metric(x, LieMetricForm::Standard);
    if (name == "lieg_printed") return ops::lie_metric(x, LieMetricForm::Printed);
    if (name == "curv") return ops::curvature_wedge(x);
    if (name == "nijenhuis") return ops::nijenhuis(x);
    throw UnknownIdentifier("unknown builtin '" + name + "'");
  }

  std::string_view text_;
  const OpEnv& env_;
  std::size_t pos_ = 0;
  std::map<std::string, OpPtr> macros_;
};

}  // namespace

bool is_builtin_name(std::string_view name) { return builtin_names().contains(name); }

OpEnv OpEnv::from_geometry(const Geometry& g) {
  OpEnv env;
  for (const auto& [name, f] : g.forms) env.bind(name, ops::form(name, f));
  const Structures& s = g.structures;
  auto bind_if_free = [&](const std::string& name, auto make) {
    if (!env.find(name)) env.bind(name, make());
  };
  if (s.J) bind_if_free("J", [&] { return ops::vec("J", VecFormField::endomorphism(*s.J)); });
  if (s.phi) bind_if_free("phi", [&] { return ops::vec("phi", VecFormField::endomorphism(*s.phi)); });
  if (s.xi) bind_if_free("xi", [&] { return ops::vec("xi", VecFormField::vector(*s.xi)); });
  if (s.eta) bind_if_free("eta", [&] { return ops::form("eta", one_form(*s.eta)); });
  if (s.theta) bind_if_free("theta", [&] { return ops::form("theta", one_form(*s.theta)); });
  return env;
}

void OpEnv::bind(const std::string& name, OpPtr e) {
  if (is_builtin_name(name)) throw ConfigError("'" + name + "' is a reserved operator name");
  names_[name] = std::move(e);
}

const OpPtr* OpEnv::find(const std::string& name) const {
  auto it = names_.find(name);
  return it == names_.end() ? nullptr : &it->second;
}

OpPtr parse_op(std::string_view text, const OpEnv& env) { return Parser(text, env).program(); }

std::string to_string(const OpPtr& e) {
  using K = OpExpr::Kind;
  auto call = [&](const char* f) {
    std::string s = std::string(f) + "(";
    for (std::size_t i = 0; i < e->args.size(); ++i) s += (i ? ", " : "") + to_string(e->args[i]);
    return s + ")";
  };
  switch (e->kind) {
    case K::FormLeaf:
    case K::VecLeaf: return e->name;
    case K::Number: return format_number(e->number);
    case K::Identity: return "Id";
    case K::ZeroForm: return "zero(" + std::to_string(e->degree) + ")";
    case K::ZeroVec: return "zerov(" + std::to_string(e->degree) + ")";
    case K::D: return call("d");
    case K::Delta: return call("delta");
    case K::DeltaRev: return call("delta_rev");
    case K::Wedge: return call("wedge");
    case K::Interior: return call("i");
    case K::Trace: return call("tr");
    case K::Flat: return call("flat");
    case K::Apply: return call("apply");
    case K::Sharp: return call("sharp");
    case K::NablaForm: return call("nablaF");
    case K::DNabla: return call("dnabla");
    case K::WedgeVec: return call("wedgev");
    case K::Compose:
    case K::OpCompose: return call("comp");
    case K::LieMetric: return call("lieg");
    case K::LieMetricPrinted: return call("lieg_printed");
    case K::CurvatureWedge: return call("curv");
    case K::Nijenhuis: return call("nijenhuis");
    case K::OpD: return "d";
    case K::OpDelta: return "delta";
    case K::OpDeltaRev: return "delta_rev";
    case K::OpEps: return call("eps");
    case K::OpInterior: return call("i");
    case K::OpLie: return call("lie");
    case K::OpNabla: return call("nabla");
    case K::OpComm: return call("comm");
    case K::OpAcomm: return call("acomm");
    case K::Add: return call("add");
    case K::Sub: return call("sub");
    case K::Neg: return call("neg");
    case K::Scale: return "scale(" + format_number(e->number) + ", " + to_string(e->args[0]) + ")";
  }
  return "?";
}

}  // namespace excal
