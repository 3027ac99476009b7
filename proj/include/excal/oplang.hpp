#pragma once

// Prefix operator language.
//
//   program := (NAME ":=" expr ";")* expr
//   expr    := NUMBER | NAME | NAME "(" expr ("," expr)* ")"
//
// Names resolve to builtins first, then to the environment (forms and
// structure tensors of a geometry plus caller bindings), then to macros
// defined earlier in the same program. Builtins, by sort of their arguments:
//
//   d, delta, delta_rev        bare: operator; with a form: the form
//   eps(F) / eps(F, G)         left wedge operator / F ^ G
//   i(V) / i(V, F)             interior product
//   lie(V) / lie(V, F)         Frolicher-Nijenhuis Lie derivative
//   nabla(V) / nabla(V, F)     covariant derivative along a tangent-valued form
//   comm(A, B[, F]), acomm(A, B[, F]), apply(A, F), comp(A, B)
//   wedge(F, G|V), wedgev(F, V), tr(V), sharp(F), flat(V), nablaF(F),
//   diamond(F), diamond0..2(F), dnabla(V), comp(V, W), lieg(V),
//   lieg_printed(V), curv(V), nijenhuis(V), zero(k), zerov(k), Id
//   add(X, Y, ...), sub(X, Y), neg(X), scale(c, X)
//
// A number literal is a constant function (degree 0 form).

#include <map>
#include <string>
#include <string_view>

#include "excal/operators.hpp"

namespace excal {

class OpEnv {
 public:
  OpEnv() = default;
  /// Forms, J, phi, xi (vecs) and eta, theta (forms) of a geometry.
  static OpEnv from_geometry(const Geometry& g);

  /// Throws ConfigError for a reserved builtin name.
  void bind(const std::string& name, OpPtr e);
  const OpPtr* find(const std::string& name) const;
  const std::map<std::string, OpPtr>& names() const { return names_; }

 private:
  std::map<std::string, OpPtr> names_;
};

bool is_builtin_name(std::string_view name);

/// Errors carry the offending span: "... in 'text' (bytes a..b)".
OpPtr parse_op(std::string_view text, const OpEnv& env);

/// Prefix rendering; leaves print their names.
std::string to_string(const OpPtr& e);

}  // namespace excal
