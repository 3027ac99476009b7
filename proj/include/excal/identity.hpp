#pragma once

// Identities between two evaluable sides, and the mixed tolerance used to
// compare them.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "excal/oplang.hpp"

namespace excal {

struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-8;
};

struct PointError {
  double abs_err = 0.0;
  /// abs_err / scale, scale = max(|lhs coeff|, |rhs coeff|, 1).
  double rel_err = 0.0;
  bool pass = true;
};

/// Coefficientwise comparison; pass iff abs_err <= atol + rtol * scale.
PointError compare(const std::vector<double>& lhs, const std::vector<double>& rhs, Tolerance tol);

using SidePair = std::pair<std::vector<double>, std::vector<double>>;
using NativeSides = std::function<SidePair(Evaluator&)>;

/// lhs == rhs, either as operator-language texts or as a native evaluator.
struct Identity {
  std::string id;
  std::string lhs, rhs;
  NativeSides native;
};

/// An identity with its expressions parsed against an environment; text sides
/// must agree in sort and degree.
class CompiledIdentity {
 public:
  CompiledIdentity(const Identity& id, const OpEnv& env);
  SidePair evaluate(Evaluator& ev) const;
  /// Derivative depth of the deeper side (0 for native identities).
  int depth() const;

 private:
  OpPtr lhs_, rhs_;
  NativeSides native_;
};

/// Flattened values at order 0 (vec components concatenated).
std::vector<double> values(Evaluator& ev, const OpPtr& e);

}  // namespace excal
