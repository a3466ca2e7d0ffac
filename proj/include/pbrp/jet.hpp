#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

namespace pbrp {

// Truncated multivariate jet in up to kMaxVars nilpotent infinitesimals
// e_0..e_{n-1} with e_p^2 = 0. Coefficients are indexed by subsets (bit masks),
// so the coefficient of e_p e_q is the mixed partial along the two directions.
class Jet {
 public:
  static constexpr int kMaxVars = 6;

  Jet() { c_[0] = 0.0; }
  Jet(double v) { c_[0] = v; }  // NOLINT: constants promote implicitly
  // only the live prefix of the coefficient array is copied
  Jet(const Jet& o) : n_(o.n_) { std::copy_n(o.c_.begin(), o.width(), c_.begin()); }
  Jet& operator=(const Jet& o) {
    if (this == &o) return *this;
    n_ = o.n_;
    std::copy_n(o.c_.begin(), o.width(), c_.begin());
    return *this;
  }

  static Jet variable(double v, int n) {
    Jet j = zeros(n);
    j.c_[0] = v;
    return j;
  }
  static Jet zeros(int n);

  int vars() const { return n_; }
  std::size_t width() const { return std::size_t(1) << n_; }
  double value() const { return c_[0]; }
  double operator[](std::size_t mask) const { return mask < width() ? c_[mask] : 0.0; }
  double& coeff(std::size_t mask) { return c_[mask]; }

  // view with n >= vars() variables; new coefficients are zero
  Jet widened(int n) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(const Jet& a, const Jet& b);

  // f(a) from the derivatives f(a0), f'(a0), ..., f^(n)(a0)
  Jet apply(const double* derivs) const;

 private:
  std::uint8_t n_ = 0;
  std::array<double, 64> c_;
};

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet pow(const Jet& a, int p);

}  // namespace pbrp
