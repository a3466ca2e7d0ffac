#include "pbrp/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbrp {

Jet Jet::zeros(int n) {
  if (n < 0 || n > kMaxVars) throw std::invalid_argument("jet: too many infinitesimals");
  Jet j;
  j.n_ = static_cast<std::uint8_t>(n);
  std::fill_n(j.c_.begin(), j.width(), 0.0);
  return j;
}

Jet Jet::widened(int n) const {
  if (n <= n_) return *this;
  Jet j = zeros(n);
  std::copy_n(c_.begin(), width(), j.c_.begin());
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.n_ > n_) *this = widened(o.n_);
  for (std::size_t m = 0; m < o.width(); ++m) c_[m] += o.c_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.n_ > n_) *this = widened(o.n_);
  for (std::size_t m = 0; m < o.width(); ++m) c_[m] -= o.c_[m];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (std::size_t m = 0; m < width(); ++m) c_[m] *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet Jet::operator-() const {
  Jet j = *this;
  j *= -1.0;
  return j;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::max(a.n_, b.n_);
  if (n == 0) return Jet(a.c_[0] * b.c_[0]);
  Jet out = Jet::zeros(n);
  const std::size_t w = out.width();
  // subset convolution over disjoint supports
  for (std::size_t m = 0; m < w; ++m) {
    double acc = 0.0;
    for (std::size_t s = m;; s = (s - 1) & m) {
      acc += a[s] * b[m ^ s];
      if (s == 0) break;
    }
    out.c_[m] = acc;
  }
  return out;
}

Jet Jet::apply(const double* derivs) const {
  Jet out = Jet::zeros(n_);
  out.c_[0] = derivs[0];
  if (n_ == 0) return out;
  Jet eta = *this;
  eta.c_[0] = 0.0;
  Jet power = eta;
  double fact = 1.0;
  for (int p = 1; p <= n_; ++p) {
    fact *= p;
    out += power * (derivs[p] / fact);
    if (p < n_) power = power * eta;
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  const double b0 = b.value();
  if (b0 == 0.0) throw std::domain_error("jet: division by zero");
  double d[Jet::kMaxVars + 1];
  double fact = 1.0, pw = 1.0 / b0;
  for (int p = 0; p <= b.vars(); ++p) {
    if (p > 0) fact *= p;
    d[p] = (p % 2 ? -1.0 : 1.0) * fact * pw;
    pw /= b0;
  }
  return a * b.apply(d);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  double d[Jet::kMaxVars + 1];
  for (int p = 0; p <= a.vars(); ++p) d[p] = cyc[p % 4];
  return a.apply(d);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  double d[Jet::kMaxVars + 1];
  for (int p = 0; p <= a.vars(); ++p) d[p] = cyc[p % 4];
  return a.apply(d);
}

Jet exp(const Jet& a) {
  double d[Jet::kMaxVars + 1];
  std::fill_n(d, a.vars() + 1, std::exp(a.value()));
  return a.apply(d);
}

Jet pow(const Jet& a, int p) {
  if (p < 0) return Jet(1.0) / pow(a, -p);
  Jet out(1.0);
  for (int q = 0; q < p; ++q) out = out * a;
  return out;
}

}  // namespace pbrp
