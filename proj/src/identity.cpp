#include "excal/identity.hpp"

#include <algorithm>
#include <cmath>

namespace excal {

PointError compare(const std::vector<double>& lhs, const std::vector<double>& rhs, Tolerance tol) {
  if (lhs.size() != rhs.size()) throw ShapeMismatch("identity sides have different sizes");
  PointError out;
  double scale = 1.0;
  bool nan = false;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double e = std::abs(lhs[i] - rhs[i]);
    // std::max drops NaN, so it is tracked separately.
    nan = nan || std::isnan(e);
    out.abs_err = std::max(out.abs_err, e);
    scale = std::max({scale, std::abs(lhs[i]), std::abs(rhs[i])});
  }
  if (nan) out.abs_err = NAN;
  out.pass = out.abs_err <= tol.atol + tol.rtol * scale;
  out.rel_err = out.abs_err / scale;
  return out;
}

CompiledIdentity::CompiledIdentity(const Identity& id, const OpEnv& env) : native_(id.native) {
  if (native_) return;
  lhs_ = parse_op(id.lhs, env);
  rhs_ = parse_op(id.rhs, env);
  if (lhs_->sort == Sort::Op || rhs_->sort == Sort::Op) {
    throw TypeError(id.id + ": identity sides must be forms or vector-valued forms, not operators");
  }
  if (lhs_->sort != rhs_->sort) {
    throw TypeError(id.id + ": a " + sort_name(lhs_->sort) + " cannot equal a " + sort_name(rhs_->sort));
  }
  if (lhs_->degree != rhs_->degree) {
    throw DegreeError(id.id + ": sides have degrees " + std::to_string(lhs_->degree) + " and " +
                      std::to_string(rhs_->degree));
  }
}

SidePair CompiledIdentity::evaluate(Evaluator& ev) const {
  if (native_) return native_(ev);
  return {values(ev, lhs_), values(ev, rhs_)};
}

int CompiledIdentity::depth() const { return native_ ? 0 : std::max(lhs_->depth, rhs_->depth); }

std::vector<double> values(Evaluator& ev, const OpPtr& e) {
  if (e->sort == Sort::Vec) return flatten(ev.vec_value(e));
  return flatten(ev.form_value(e));
}

}  // namespace excal
