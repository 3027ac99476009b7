#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet carries every partial derivative of a scalar quantity at a fixed point
// up to total order K. Coefficients are stored densely over all multi-indices
// |alpha| <= K in graded order, normalised as Taylor coefficients
// (d^alpha f / alpha!) so that products are plain truncated convolutions.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace excal {

using MultiIndex = std::vector<int>;

/// Shared, immutable enumeration of the multi-indices for one (n_vars, order).
/// Layouts are created once per shape and live for the whole process.
class JetLayout {
 public:
  static const JetLayout& get(int n_vars, int order);

  int n_vars() const { return n_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& index(std::size_t pos) const { return indices_[pos]; }
  /// Position of `alpha`, or -1 when |alpha| > order.
  int position(std::span<const int> alpha) const;

  struct ProductTerm {
    std::uint32_t lhs, rhs, out;
  };
  const std::vector<ProductTerm>& product_terms() const { return product_; }

  struct DerivTerm {
    std::uint32_t src;  // position in this layout
    double factor;      // alpha_v + 1
  };
  /// For variable v: entry j gives where coefficient j of the order-1 layout
  /// comes from when differentiating along v.
  const std::vector<DerivTerm>& derivative_terms(int v) const { return deriv_[v]; }

 private:
  JetLayout(int n_vars, int order);
  std::uint64_t key(std::span<const int> alpha) const;

  int n_vars_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<std::pair<std::uint64_t, int>> lookup_;  // sorted by key
  std::vector<ProductTerm> product_;
  std::vector<std::vector<DerivTerm>> deriv_;
};

enum class JetFn { Sin, Cos, Tan, Exp, Log, Sqrt };

std::string_view to_string(JetFn fn);

class Jet {
 public:
  /// A zero jet of the given shape.
  Jet(int n_vars, int order);

  static Jet constant(double c, int n_vars, int order);
  static Jet variable(std::span<const double> point, int i, int order);

  int n_vars() const { return layout_->n_vars(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }

  double value() const { return coeffs_[0]; }
  /// Raw partial derivative d^alpha f (not the Taylor coefficient).
  double partial(std::span<const int> alpha) const;
  double partial(std::initializer_list<int> alpha) const {
    return partial(std::span<const int>(alpha.begin(), alpha.size()));
  }
  /// Taylor coefficients in layout order.
  std::span<const double> taylor() const { return coeffs_; }

  /// d/dx_v, one order lower.
  Jet derivative(int v) const;
  /// Projection onto a lower (or equal) order.
  Jet truncated(int order) const;
  bool is_constant() const;

  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(const Jet& b);
  Jet& operator/=(const Jet& b);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    coeffs_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

 private:
  Jet(const JetLayout* layout, std::vector<double> coeffs)
      : layout_(layout), coeffs_(std::move(coeffs)) {}
  void require_same_shape(const Jet& b, const char* op) const;

  friend Jet compose(const Jet& a, std::span<const double> derivs);

  const JetLayout* layout_;
  std::vector<double> coeffs_;
};

/// Taylor expansion of f(a) given f^(j)(a.value()) for j = 0..a.order().
Jet compose(const Jet& a, std::span<const double> derivs);

Jet apply(JetFn fn, const Jet& a);
Jet reciprocal(const Jet& a);
/// a^r: any real r when a.value() > 0; integral r for any nonzero value;
/// nonnegative integral r for any value.
Jet pow(const Jet& a, double r);
/// a^b with a jet-valued exponent, via exp(b log a).
Jet pow(const Jet& a, const Jet& b);

inline Jet sin(const Jet& a) { return apply(JetFn::Sin, a); }
inline Jet cos(const Jet& a) { return apply(JetFn::Cos, a); }
inline Jet tan(const Jet& a) { return apply(JetFn::Tan, a); }
inline Jet exp(const Jet& a) { return apply(JetFn::Exp, a); }
inline Jet log(const Jet& a) { return apply(JetFn::Log, a); }
inline Jet sqrt(const Jet& a) { return apply(JetFn::Sqrt, a); }

}  // namespace excal
