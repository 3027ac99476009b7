#include "excal/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "excal/errors.hpp"

namespace excal {

namespace {

constexpr int kMaxVars = 16;

void enumerate_degree(int n, int remaining, int var, MultiIndex& cur,
                      std::vector<MultiIndex>& out) {
  if (var == n - 1) {
    cur[var] = remaining;
    out.push_back(cur);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    cur[var] = a;
    enumerate_degree(n, remaining - a, var + 1, cur, out);
  }
  cur[var] = 0;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

JetLayout::JetLayout(int n_vars, int order) : n_vars_(n_vars), order_(order) {
  if (n_vars <= 0 || n_vars > kMaxVars) {
    throw ShapeMismatch("jet dimension must be in 1.." + std::to_string(kMaxVars));
  }
  if (order < 0) throw OrderExceeded("jet order must be nonnegative");
  MultiIndex cur(n_vars, 0);
  for (int d = 0; d <= order; ++d) enumerate_degree(n_vars, d, 0, cur, indices_);

  lookup_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    lookup_.emplace_back(key(indices_[i]), static_cast<int>(i));
  }
  std::sort(lookup_.begin(), lookup_.end());

  MultiIndex sum(n_vars);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    int di = std::accumulate(indices_[i].begin(), indices_[i].end(), 0);
    for (std::size_t j = 0; j < indices_.size(); ++j) {
      int dj = std::accumulate(indices_[j].begin(), indices_[j].end(), 0);
      if (di + dj > order) continue;
      for (int v = 0; v < n_vars; ++v) sum[v] = indices_[i][v] + indices_[j][v];
      product_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          static_cast<std::uint32_t>(position(sum))});
    }
  }

  deriv_.resize(n_vars);
  if (order > 0) {
    const JetLayout& lower = get(n_vars, order - 1);
    MultiIndex up(n_vars);
    for (int v = 0; v < n_vars; ++v) {
      deriv_[v].reserve(lower.size());
      for (std::size_t j = 0; j < lower.size(); ++j) {
        up = lower.index(j);
        up[v] += 1;
        deriv_[v].push_back({static_cast<std::uint32_t>(position(up)),
                             static_cast<double>(up[v])});
      }
    }
  }
}

const JetLayout& JetLayout::get(int n_vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  // Per-thread front cache keeps the shared lock off the hot path.
  constexpr int kFront = 16;
  thread_local const JetLayout* front[kFront][kFront] = {};
  const bool small = n_vars >= 0 && n_vars < kFront && order >= 0 && order < kFront;
  if (small && front[n_vars][order]) return *front[n_vars][order];
  {
    std::lock_guard lock(mu);
    auto it = cache.find({n_vars, order});
    if (it != cache.end()) {
      if (small) front[n_vars][order] = it->second.get();
      return *it->second;
    }
  }
  // Construction recurses into get() for the lower order, so build unlocked.
  std::unique_ptr<JetLayout> fresh(new JetLayout(n_vars, order));
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.emplace(std::pair{n_vars, order}, std::move(fresh));
  if (small) front[n_vars][order] = it->second.get();
  return *it->second;
}

std::uint64_t JetLayout::key(std::span<const int> alpha) const {
  std::uint64_t k = 0;
  for (int v = n_vars_ - 1; v >= 0; --v) k = k * static_cast<std::uint64_t>(order_ + 1) + alpha[v];
  return k;
}

int JetLayout::position(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_vars_) {
    throw ShapeMismatch("multi-index length " + std::to_string(alpha.size()) +
                        " does not match jet dimension " + std::to_string(n_vars_));
  }
  int total = 0;
  for (int a : alpha) {
    if (a < 0) throw ShapeMismatch("negative multi-index entry");
    total += a;
  }
  if (total > order_) return -1;
  auto k = key(alpha);
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::pair{k, -1});
  return it->second;
}

std::string_view to_string(JetFn fn) {
  switch (fn) {
    case JetFn::Sin: return "sin";
    case JetFn::Cos: return "cos";
    case JetFn::Tan: return "tan";
    case JetFn::Exp: return "exp";
    case JetFn::Log: return "log";
    case JetFn::Sqrt: return "sqrt";
  }
  return "?";
}

Jet::Jet(int n_vars, int order) : layout_(&JetLayout::get(n_vars, order)) {
  coeffs_.assign(layout_->size(), 0.0);
}

Jet Jet::constant(double c, int n_vars, int order) {
  Jet j(n_vars, order);
  j.coeffs_[0] = c;
  return j;
}

Jet Jet::variable(std::span<const double> point, int i, int order) {
  int n = static_cast<int>(point.size());
  if (i < 0 || i >= n) {
    throw IndexOutOfRange("coordinate index " + std::to_string(i) + " outside 0.." +
                          std::to_string(n - 1));
  }
  Jet j(n, order);
  j.coeffs_[0] = point[i];
  if (order >= 1) {
    MultiIndex e(n, 0);
    e[i] = 1;
    j.coeffs_[j.layout_->position(e)] = 1.0;
  }
  return j;
}

double Jet::partial(std::span<const int> alpha) const {
  int pos = layout_->position(alpha);
  if (pos < 0) {
    throw OrderExceeded("requested derivative beyond jet order " + std::to_string(order()));
  }
  double f = 1.0;
  for (int a : alpha) f *= factorial(a);
  return coeffs_[pos] * f;
}

Jet Jet::derivative(int v) const {
  if (v < 0 || v >= n_vars()) throw IndexOutOfRange("derivative variable out of range");
  if (order() == 0) throw OrderExceeded("cannot differentiate an order-0 jet");
  const auto& terms = layout_->derivative_terms(v);
  std::vector<double> out(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) out[j] = terms[j].factor * coeffs_[terms[j].src];
  return Jet(&JetLayout::get(n_vars(), order() - 1), std::move(out));
}

Jet Jet::truncated(int order) const {
  if (order > this->order()) {
    throw OrderExceeded("cannot raise jet order from " + std::to_string(this->order()) + " to " +
                        std::to_string(order));
  }
  if (order == this->order()) return *this;
  const JetLayout& lower = JetLayout::get(n_vars(), order);
  return Jet(&lower, std::vector<double>(coeffs_.begin(), coeffs_.begin() + lower.size()));
}

bool Jet::is_constant() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; });
}

void Jet::require_same_shape(const Jet& b, const char* op) const {
  if (layout_ != b.layout_) {
    throw ShapeMismatch(std::string("jet ") + op + " on shapes (" + std::to_string(n_vars()) +
                        "," + std::to_string(order()) + ") and (" + std::to_string(b.n_vars()) +
                        "," + std::to_string(b.order()) + ")");
  }
}

Jet& Jet::operator+=(const Jet& b) {
  require_same_shape(b, "add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += b.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& b) {
  require_same_shape(b, "sub");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= b.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.require_same_shape(b, "mul");
  std::vector<double> out(a.coeffs_.size(), 0.0);
  for (const auto& t : a.layout_->product_terms()) out[t.out] += a.coeffs_[t.lhs] * b.coeffs_[t.rhs];
  return Jet(a.layout_, std::move(out));
}

Jet& Jet::operator*=(const Jet& b) { return *this = *this * b; }

Jet operator/(const Jet& a, const Jet& b) {
  a.require_same_shape(b, "div");
  return a * reciprocal(b);
}

Jet& Jet::operator/=(const Jet& b) { return *this = *this / b; }

Jet compose(const Jet& a, std::span<const double> derivs) {
  const int K = a.order();
  Jet h = a;
  h.coeffs_[0] = 0.0;
  Jet out = Jet::constant(derivs[0], a.n_vars(), K);
  if (K == 0) return out;
  Jet hp = h;
  double fact = 1.0;
  for (int j = 1; j <= K; ++j) {
    fact *= j;
    double c = derivs[j] / fact;
    if (c != 0.0) {
      for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] += c * hp.coeffs_[i];
    }
    if (j < K) hp = hp * h;
  }
  return out;
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw DivisionByZeroAtPoint("division by a quantity vanishing at the point");
  const int K = a.order();
  std::vector<double> d(K + 1);
  // d^j/dx^j (1/x) = (-1)^j j! / x^(j+1)
  double fact = 1.0, pw = 1.0 / x;
  for (int j = 0; j <= K; ++j) {
    if (j > 0) fact *= j;
    d[j] = ((j % 2) ? -1.0 : 1.0) * fact * pw;
    pw /= x;
  }
  return compose(a, d);
}

Jet apply(JetFn fn, const Jet& a) {
  const double x = a.value();
  const int K = a.order();
  std::vector<double> d(K + 1);
  switch (fn) {
    case JetFn::Sin:
    case JetFn::Cos: {
      const double s = std::sin(x), c = std::cos(x);
      // sin: s, c, -s, -c ; cos: c, -s, -c, s
      const double cyc_sin[4] = {s, c, -s, -c};
      const double cyc_cos[4] = {c, -s, -c, s};
      for (int j = 0; j <= K; ++j) d[j] = (fn == JetFn::Sin ? cyc_sin : cyc_cos)[j % 4];
      return compose(a, d);
    }
    case JetFn::Tan: {
      Jet c = apply(JetFn::Cos, a);
      if (c.value() == 0.0) {
        throw DomainError("tan undefined at " + fmt_value(x));
      }
      return apply(JetFn::Sin, a) / c;
    }
    case JetFn::Exp: {
      const double e = std::exp(x);
      std::fill(d.begin(), d.end(), e);
      return compose(a, d);
    }
    case JetFn::Log: {
      if (!(x > 0.0)) throw DomainError("log undefined at " + fmt_value(x));
      d[0] = std::log(x);
      // d^j/dx^j log x = (-1)^(j-1) (j-1)! / x^j
      double fact = 1.0, pw = 1.0 / x;
      for (int j = 1; j <= K; ++j) {
        if (j > 1) fact *= (j - 1);
        d[j] = ((j % 2) ? 1.0 : -1.0) * fact * pw;
        pw /= x;
      }
      return compose(a, d);
    }
    case JetFn::Sqrt: {
      if (x < 0.0 || (x == 0.0 && K > 0)) throw DomainError("sqrt undefined at " + fmt_value(x));
      return pow(a, 0.5);
    }
  }
  throw DomainError("unknown function");
}

namespace {

Jet integer_power(const Jet& a, long e) {
  Jet result = Jet::constant(1.0, a.n_vars(), a.order());
  Jet base = a;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

}  // namespace

Jet pow(const Jet& a, double r) {
  const double x = a.value();
  const bool integral = std::isfinite(r) && r == std::floor(r) && std::fabs(r) < 1e9;
  if (integral && r >= 0.0 && x <= 0.0) return integer_power(a, static_cast<long>(r));
  if (integral && r < 0.0 && x < 0.0) return integer_power(reciprocal(a), static_cast<long>(-r));
  if (x == 0.0 && r < 0.0) throw DivisionByZeroAtPoint("negative power of a vanishing quantity");
  if (x == 0.0 && a.order() == 0) return Jet::constant(0.0, a.n_vars(), 0);
  if (!(x > 0.0)) {
    throw DomainError("pow with exponent " + fmt_value(r) + " undefined at " + fmt_value(x));
  }
  const int K = a.order();
  std::vector<double> d(K + 1);
  // d^j/dx^j x^r = r (r-1) ... (r-j+1) x^(r-j)
  double falling = 1.0;
  for (int j = 0; j <= K; ++j) {
    d[j] = falling * std::pow(x, r - j);
    falling *= (r - j);
  }
  return compose(a, d);
}

Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) return pow(a, b.value());
  if (!(a.value() > 0.0)) {
    throw DomainError("pow with non-constant exponent needs a positive base, got " +
                      fmt_value(a.value()));
  }
  Jet out = exp(b * log(a));
  // Keep the value bit-identical to the order-0 path, which uses std::pow.
  out += std::pow(a.value(), b.value()) - out.value();
  return out;
}

}  // namespace excal
