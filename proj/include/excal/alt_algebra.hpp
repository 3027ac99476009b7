#pragma once

// Pointwise multilinear algebra of alternating tensors.
//
// An AltTensor<S> of degree k in dimension n stores the coefficients c_I of
// sum_I c_I dx^I over strictly increasing index tuples I, enumerated in
// lexicographic order. The scalar type S is `double` for plain values and
// `Jet` for fields known to some order around a point. Wedge products use the
// shuffle (determinant) convention: (dx^1 ^ dx^2)(d_1, d_2) = 1.
//
// A VecAltTensor<S> is a tangent-valued form: component b is the coefficient
// of the coordinate vector d_b.

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "excal/errors.hpp"

namespace excal {

using IndexMask = std::uint32_t;

/// Enumeration of increasing tuples for one dimension, cached per n.
class TupleTable {
 public:
  static const TupleTable& get(int n);

  int dim() const { return n_; }
  /// Index tuples of length k, as bitmasks, in lexicographic order.
  const std::vector<IndexMask>& masks(int k) const { return masks_[k]; }
  /// Position of a mask within its degree.
  int position(IndexMask m) const { return pos_[m]; }

 private:
  explicit TupleTable(int n);
  int n_;
  std::vector<std::vector<IndexMask>> masks_;
  std::vector<int> pos_;
};

constexpr int kMaxDim = 12;

long binomial(int n, int k);

/// Ascending indices of a mask.
std::vector<int> mask_indices(IndexMask m);
IndexMask indices_mask(std::span<const int> idx);

/// (-1)^(number of pairs (a in P, r in R) with r < a): the sign of the shuffle
/// that lists P then R, relative to the sorted union.
inline int shuffle_sign(IndexMask P, IndexMask R) {
  int inv = 0;
  while (P) {
    int a = std::countr_zero(P);
    P &= P - 1;
    inv += std::popcount(R & ((IndexMask{1} << a) - 1));
  }
  return (inv & 1) ? -1 : 1;
}

template <class S>
class AltTensor {
 public:
  AltTensor() = default;
  AltTensor(int n, int k, S zero) : n_(n), k_(k), zero_(std::move(zero)) {
    if (n < 1 || n > kMaxDim) throw ShapeMismatch("dimension must be in 1.." + std::to_string(kMaxDim));
    if (in_range()) coeffs_.assign(static_cast<std::size_t>(binomial(n, k)), zero_);
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  /// Degree outside [0, n]: the canonical zero, holding no coefficients.
  bool empty() const { return !in_range(); }
  bool in_range() const { return k_ >= 0 && k_ <= n_; }
  const S& zero() const { return zero_; }

  std::size_t size() const { return coeffs_.size(); }
  S& operator[](std::size_t pos) { return coeffs_[pos]; }
  const S& operator[](std::size_t pos) const { return coeffs_[pos]; }
  std::span<S> coeffs() { return coeffs_; }
  std::span<const S> coeffs() const { return coeffs_; }

  const std::vector<IndexMask>& masks() const { return TupleTable::get(n_).masks(k_); }
  S& at(IndexMask m) { return coeffs_[TupleTable::get(n_).position(m)]; }
  const S& at(IndexMask m) const { return coeffs_[TupleTable::get(n_).position(m)]; }
  /// Coefficient for ascending 0-based indices.
  const S& at(std::span<const int> idx) const { return at(indices_mask(idx)); }

  AltTensor& operator+=(const AltTensor& b) {
    check_same(b);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += b.coeffs_[i];
    return *this;
  }
  AltTensor& operator-=(const AltTensor& b) {
    check_same(b);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= b.coeffs_[i];
    return *this;
  }
  AltTensor& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend AltTensor operator+(AltTensor a, const AltTensor& b) { return a += b; }
  friend AltTensor operator-(AltTensor a, const AltTensor& b) { return a -= b; }
  friend AltTensor operator*(AltTensor a, double s) { return a *= s; }
  friend AltTensor operator*(double s, AltTensor a) { return a *= s; }
  friend AltTensor operator-(AltTensor a) { return a *= -1.0; }

  /// Multiplies every coefficient by a scalar function.
  AltTensor scaled(const S& f) const {
    AltTensor out = *this;
    for (auto& c : out.coeffs_) c = f * c;
    return out;
  }

  template <class F>
  auto map(F&& f) const {
    using T = decltype(f(zero_));
    AltTensor<T> out(n_, k_, f(zero_));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = f(coeffs_[i]);
    return out;
  }

 private:
  void check_same(const AltTensor& b) const {
    if (b.n_ != n_ || b.k_ != k_) {
      throw DegreeError("adding forms of shape (n=" + std::to_string(n_) + ",k=" +
                        std::to_string(k_) + ") and (n=" + std::to_string(b.n_) + ",k=" +
                        std::to_string(b.k_) + ")");
    }
  }

  int n_ = 1;
  int k_ = 0;
  S zero_{};
  std::vector<S> coeffs_;
};

template <class S>
class VecAltTensor {
 public:
  VecAltTensor() = default;
  VecAltTensor(int n, int k, const S& zero) : n_(n), k_(k) {
    comps_.reserve(n);
    for (int b = 0; b < n; ++b) comps_.emplace_back(n, k, zero);
  }
  explicit VecAltTensor(std::vector<AltTensor<S>> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw ShapeMismatch("vector-valued form needs components");
    n_ = comps_[0].dim();
    k_ = comps_[0].degree();
    if (static_cast<int>(comps_.size()) != n_) throw ShapeMismatch("component count must equal dimension");
    for (const auto& c : comps_) {
      if (c.dim() != n_ || c.degree() != k_) throw DegreeError("components must share degree");
    }
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  bool empty() const { return k_ < 0 || k_ > n_; }
  const S& zero() const { return comps_[0].zero(); }

  AltTensor<S>& operator[](int b) { return comps_[b]; }
  const AltTensor<S>& operator[](int b) const { return comps_[b]; }

  VecAltTensor& operator+=(const VecAltTensor& o) {
    check_same(o);
    for (int b = 0; b < n_; ++b) comps_[b] += o.comps_[b];
    return *this;
  }
  VecAltTensor& operator-=(const VecAltTensor& o) {
    check_same(o);
    for (int b = 0; b < n_; ++b) comps_[b] -= o.comps_[b];
    return *this;
  }
  VecAltTensor& operator*=(double s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  friend VecAltTensor operator+(VecAltTensor a, const VecAltTensor& b) { return a += b; }
  friend VecAltTensor operator-(VecAltTensor a, const VecAltTensor& b) { return a -= b; }
  friend VecAltTensor operator*(VecAltTensor a, double s) { return a *= s; }
  friend VecAltTensor operator*(double s, VecAltTensor a) { return a *= s; }
  friend VecAltTensor operator-(VecAltTensor a) { return a *= -1.0; }

  template <class F>
  auto map(F&& f) const {
    using T = decltype(f(zero()));
    std::vector<AltTensor<T>> out;
    out.reserve(n_);
    for (const auto& c : comps_) out.push_back(c.map(f));
    return VecAltTensor<T>(std::move(out));
  }

 private:
  void check_same(const VecAltTensor& o) const {
    if (o.n_ != n_ || o.k_ != k_) throw DegreeError("adding vector-valued forms of different shapes");
  }

  int n_ = 1;
  int k_ = 0;
  std::vector<AltTensor<S>> comps_;
};

using AltValue = AltTensor<double>;
using VecAltValue = VecAltTensor<double>;

// ---------------------------------------------------------------------------
// Operations

/// a ^ b, summed over (ka, kb)-shuffles.
template <class S>
AltTensor<S> wedge(const AltTensor<S>& a, const AltTensor<S>& b) {
  if (a.dim() != b.dim()) throw ShapeMismatch("wedge of forms in different dimensions");
  AltTensor<S> out(a.dim(), a.degree() + b.degree(), a.zero());
  if (out.empty() || a.empty() || b.empty()) return out;
  const auto& am = a.masks();
  const auto& bm = b.masks();
  for (std::size_t i = 0; i < am.size(); ++i) {
    for (std::size_t j = 0; j < bm.size(); ++j) {
      if (am[i] & bm[j]) continue;
      S term = a[i] * b[j];
      if (shuffle_sign(am[i], bm[j]) < 0) {
        out.at(am[i] | bm[j]) -= term;
      } else {
        out.at(am[i] | bm[j]) += term;
      }
    }
  }
  return out;
}

/// omega ^ phi componentwise.
template <class S>
VecAltTensor<S> wedge(const AltTensor<S>& omega, const VecAltTensor<S>& phi) {
  std::vector<AltTensor<S>> comps;
  comps.reserve(phi.dim());
  for (int b = 0; b < phi.dim(); ++b) comps.push_back(wedge(omega, phi[b]));
  return VecAltTensor<S>(std::move(comps));
}

/// omega(d_b, Y_1, ...) as a form in the remaining slots: classical i_{d_b}.
template <class S>
AltTensor<S> interior_basis(int b, const AltTensor<S>& omega) {
  AltTensor<S> out(omega.dim(), omega.degree() - 1, omega.zero());
  if (out.empty() || omega.empty()) return out;
  const IndexMask bit = IndexMask{1} << b;
  const auto& om = out.masks();
  for (std::size_t r = 0; r < om.size(); ++r) {
    if (om[r] & bit) continue;
    const int sgn = (std::popcount(om[r] & (bit - 1)) & 1) ? -1 : 1;
    out[r] = omega.at(om[r] | bit);
    if (sgn < 0) out[r] *= -1.0;
  }
  return out;
}

/// Interior product i_phi omega for a tangent-valued p-form phi, by direct
/// enumeration of the (p, k-1)-shuffles. Degree p + k - 1; annihilates
/// functions.
template <class S>
AltTensor<S> interior(const VecAltTensor<S>& phi, const AltTensor<S>& omega) {
  if (phi.dim() != omega.dim()) throw ShapeMismatch("interior product across dimensions");
  const int n = omega.dim();
  const int p = phi.degree();
  const int k = omega.degree();
  AltTensor<S> out(n, p + k - 1, omega.zero());
  if (out.empty() || omega.empty() || phi.empty() || k == 0) return out;
  const auto& table = TupleTable::get(n);
  const auto& outm = out.masks();
  for (std::size_t j = 0; j < outm.size(); ++j) {
    const IndexMask J = outm[j];
    S acc = omega.zero();
    // Each p-subset P of J fixes a shuffle; R is the complement in J.
    for (IndexMask P : table.masks(p)) {
      if ((P & J) != P) continue;
      const IndexMask R = J & ~P;
      const int sigma = shuffle_sign(P, R);
      for (int b = 0; b < n; ++b) {
        const IndexMask bit = IndexMask{1} << b;
        if (R & bit) continue;
        // omega(d_b, e_R) = (-1)^{#R below b} omega_{b u R}
        const int sb = sigma * ((std::popcount(R & (bit - 1)) & 1) ? -1 : 1);
        S term = phi[b].at(P) * omega.at(R | bit);
        if (sb < 0) {
          acc -= term;
        } else {
          acc += term;
        }
      }
    }
    out[j] = std::move(acc);
  }
  return out;
}

/// Contraction tr(sum omega_i ^ X_i) = sum i_{X_i} omega_i. Degree k - 1.
template <class S>
AltTensor<S> trace(const VecAltTensor<S>& phi) {
  if (phi.degree() == 0) throw DegreeError("trace of a vector field is undefined");
  AltTensor<S> out(phi.dim(), phi.degree() - 1, phi.zero());
  if (out.empty() || phi.empty()) return out;
  for (int b = 0; b < phi.dim(); ++b) out += interior_basis(b, phi[b]);
  return out;
}

/// omega^# = sum_{a,b} g^{ab} (i_{d_a} omega) ^ d_b, a tangent-valued (k-1)-form.
/// `g_inv` is row-major n x n.
template <class S>
VecAltTensor<S> sharp(const AltTensor<S>& omega, std::span<const S> g_inv) {
  if (omega.degree() == 0) throw DegreeError("sharp of a function is undefined");
  const int n = omega.dim();
  if (static_cast<int>(g_inv.size()) != n * n) throw ShapeMismatch("inverse metric must be n x n");
  VecAltTensor<S> out(n, omega.degree() - 1, omega.zero());
  if (omega.empty() || out.empty()) return out;
  std::vector<AltTensor<S>> contracted;
  contracted.reserve(n);
  for (int a = 0; a < n; ++a) contracted.push_back(interior_basis(a, omega));
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) out[b] += contracted[a].scaled(g_inv[a * n + b]);
  }
  return out;
}

/// Composition of an endomorphism-valued 1-form phi after a tangent-valued
/// form psi: (phi o psi)^c = sum_b phi^c(d_b) psi^b.
template <class S>
VecAltTensor<S> compose(const VecAltTensor<S>& phi, const VecAltTensor<S>& psi) {
  if (phi.degree() != 1) throw DegreeError("composition needs an endomorphism (degree 1) on the left");
  const int n = phi.dim();
  VecAltTensor<S> out(n, psi.degree(), psi.zero());
  if (psi.empty()) return out;
  for (int c = 0; c < n; ++c) {
    for (int b = 0; b < n; ++b) out[c] += psi[b].scaled(phi[c].at(IndexMask{1} << b));
  }
  return out;
}

/// Tangent vector as a degree-0 tangent-valued form.
template <class S>
VecAltTensor<S> as_vector_form(std::span<const S> v, const S& zero) {
  const int n = static_cast<int>(v.size());
  VecAltTensor<S> out(n, 0, zero);
  for (int b = 0; b < n; ++b) out[b][0] = v[b];
  return out;
}

/// The identity endomorphism: component b is dx^b.
template <class S>
VecAltTensor<S> identity_endomorphism(int n, const S& zero, const S& one) {
  VecAltTensor<S> out(n, 1, zero);
  for (int b = 0; b < n; ++b) out[b].at(IndexMask{1} << b) = one;
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle (double only): full alternating evaluation.

/// omega(v_1, ..., v_k) via the determinant expansion over basis tuples.
double apply(const AltValue& omega, std::span<const std::vector<double>> vectors);
/// Tangent vector phi(v_1, ..., v_k).
std::vector<double> apply(const VecAltValue& phi, std::span<const std::vector<double>> vectors);

/// Values of a vector-valued form on a list of vectors, built from the
/// oracle: i_phi omega evaluated by the literal shuffle-sum definition.
double interior_oracle(const VecAltValue& phi, const AltValue& omega,
                       std::span<const std::vector<double>> vectors);

/// Coefficients reconstructed from an evaluation functional on basis vectors.
AltValue from_evaluator(int n, int k,
                        const std::function<double(std::span<const std::vector<double>>)>& f);

/// Concatenated coefficients (components in order for vector-valued values).
std::vector<double> flatten(const AltValue& a);
std::vector<double> flatten(const VecAltValue& a);

}  // namespace excal
