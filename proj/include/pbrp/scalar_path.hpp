#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pbrp {

// Real path with a closed-form derivative. Used for letter drivers and tree
// intensities.
class ScalarPath {
 public:
  ScalarPath();  // identically zero
  ScalarPath(std::string kind, std::function<double(double)> value,
             std::function<double(double)> derivative);

  double operator()(double t) const { return value_(t); }
  double derivative(double t) const { return deriv_(t); }
  const std::string& kind() const { return kind_; }

  static ScalarPath zero();
  // sum_k c_k t^k
  static ScalarPath polynomial(std::vector<double> coeffs);
  // sum_k a_k sin(w_k t + phi_k)
  struct Wave {
    double amplitude, frequency, phase;
  };
  static ScalarPath trig(std::vector<Wave> waves);
  // Spectral synthesis of an fbm-like test signal on [0, T]:
  //   amp * sum_{k=1}^{modes} k^{-(H+1/2)} (a_k sin(2 pi k t / T) + b_k (cos(2 pi k t / T) - 1))
  // with a_k, b_k standard normal from a seeded generator. X(0) = 0.
  static ScalarPath fbm_synthetic(double hurst, int modes, std::uint64_t seed, double amplitude,
                                  double horizon);
  ScalarPath scaled(double s) const;

 private:
  std::string kind_;
  std::function<double(double)> value_, deriv_;
};

}  // namespace pbrp
