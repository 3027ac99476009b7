#include "excal/alt_algebra.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace excal {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<int> mask_indices(IndexMask m) {
  std::vector<int> out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

IndexMask indices_mask(std::span<const int> idx) {
  IndexMask m = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= kMaxDim) throw IndexOutOfRange("form index out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) throw IndexOutOfRange("form indices must be strictly increasing");
    m |= IndexMask{1} << idx[i];
  }
  return m;
}

namespace {

void lex_tuples(int n, int k, int start, IndexMask cur, std::vector<IndexMask>& out) {
  if (k == 0) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i <= n - k; ++i) lex_tuples(n, k - 1, i + 1, cur | (IndexMask{1} << i), out);
}

}  // namespace

TupleTable::TupleTable(int n) : n_(n), masks_(n + 1), pos_(std::size_t{1} << n, -1) {
  for (int k = 0; k <= n; ++k) {
    lex_tuples(n, k, 0, 0, masks_[k]);
    for (std::size_t i = 0; i < masks_[k].size(); ++i) pos_[masks_[k][i]] = static_cast<int>(i);
  }
}

const TupleTable& TupleTable::get(int n) {
  static std::once_flag once[kMaxDim + 1];
  static std::unique_ptr<TupleTable> tables[kMaxDim + 1];
  if (n < 1 || n > kMaxDim) throw ShapeMismatch("dimension must be in 1.." + std::to_string(kMaxDim));
  std::call_once(once[n], [n] { tables[n].reset(new TupleTable(n)); });
  return *tables[n];
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

int permutation_sign(std::span<const int> perm) {
  int inv = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) inv += perm[i] > perm[j];
  }
  return (inv & 1) ? -1 : 1;
}

// Leibniz expansion of det(M) with M[r][c] = vectors[c][rows[r]].
double minor_det(std::span<const int> rows, std::span<const std::vector<double>> vectors) {
  const int k = static_cast<int>(rows.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double det = 0.0;
  do {
    double term = permutation_sign(perm);
    for (int r = 0; r < k; ++r) term *= vectors[perm[r]][rows[r]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

double apply(const AltValue& omega, std::span<const std::vector<double>> vectors) {
  if (static_cast<int>(vectors.size()) != omega.degree()) {
    throw ArityError("form of degree " + std::to_string(omega.degree()) + " applied to " +
                     std::to_string(vectors.size()) + " vectors");
  }
  if (omega.empty()) return 0.0;
  const auto& masks = omega.masks();
  double total = 0.0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    auto rows = mask_indices(masks[i]);
    total += omega[i] * minor_det(rows, vectors);
  }
  return total;
}

std::vector<double> apply(const VecAltValue& phi, std::span<const std::vector<double>> vectors) {
  std::vector<double> out(phi.dim());
  for (int b = 0; b < phi.dim(); ++b) out[b] = excal::apply(phi[b], vectors);
  return out;
}

double interior_oracle(const VecAltValue& phi, const AltValue& omega,
                       std::span<const std::vector<double>> vectors) {
  const int p = phi.degree();
  const int k = omega.degree();
  const int m = p + k - 1;
  if (static_cast<int>(vectors.size()) != m) throw ArityError("wrong number of vectors");
  if (k == 0) return 0.0;
  // Enumerate (p, k-1)-shuffles as the choice of the first p positions.
  std::vector<int> sel(m, 0);
  std::fill(sel.begin(), sel.begin() + p, 1);
  std::sort(sel.begin(), sel.end(), std::greater<>());
  double total = 0.0;
  do {
    std::vector<int> perm;
    for (int i = 0; i < m; ++i) {
      if (sel[i]) perm.push_back(i);
    }
    for (int i = 0; i < m; ++i) {
      if (!sel[i]) perm.push_back(i);
    }
    std::vector<std::vector<double>> head, args;
    for (int i = 0; i < p; ++i) head.push_back(vectors[perm[i]]);
    args.push_back(excal::apply(phi, std::span<const std::vector<double>>(head)));
    for (int i = p; i < m; ++i) args.push_back(vectors[perm[i]]);
    total += permutation_sign(perm) * excal::apply(omega, std::span<const std::vector<double>>(args));
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return total;
}

AltValue from_evaluator(int n, int k,
                        const std::function<double(std::span<const std::vector<double>>)>& f) {
  AltValue out(n, k, 0.0);
  if (out.empty()) return out;
  const auto& masks = out.masks();
  for (std::size_t i = 0; i < masks.size(); ++i) {
    std::vector<std::vector<double>> basis;
    for (int idx : mask_indices(masks[i])) {
      std::vector<double> e(n, 0.0);
      e[idx] = 1.0;
      basis.push_back(std::move(e));
    }
    out[i] = f(basis);
  }
  return out;
}

std::vector<double> flatten(const AltValue& a) {
  return std::vector<double>(a.coeffs().begin(), a.coeffs().end());
}

std::vector<double> flatten(const VecAltValue& a) {
  std::vector<double> out;
  for (int b = 0; b < a.dim(); ++b) {
    out.insert(out.end(), a[b].coeffs().begin(), a[b].coeffs().end());
  }
  return out;
}

}  // namespace excal
