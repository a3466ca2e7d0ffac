#include "pbrp/scalar_path.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pbrp {

ScalarPath::ScalarPath() : ScalarPath(zero()) {}

ScalarPath::ScalarPath(std::string kind, std::function<double(double)> value,
                       std::function<double(double)> derivative)
    : kind_(std::move(kind)), value_(std::move(value)), deriv_(std::move(derivative)) {}

ScalarPath ScalarPath::zero() {
  return ScalarPath("zero", [](double) { return 0.0; }, [](double) { return 0.0; });
}

ScalarPath ScalarPath::polynomial(std::vector<double> c) {
  auto horner = [c](double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  std::vector<double> dc;
  for (std::size_t k = 1; k < c.size(); ++k) dc.push_back(c[k] * double(k));
  auto dhorner = [dc](double t) {
    double acc = 0.0;
    for (auto it = dc.rbegin(); it != dc.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  return ScalarPath("polynomial", horner, dhorner);
}

ScalarPath ScalarPath::trig(std::vector<Wave> w) {
  auto v = [w](double t) {
    double acc = 0.0;
    for (const auto& x : w) acc += x.amplitude * std::sin(x.frequency * t + x.phase);
    return acc;
  };
  auto d = [w](double t) {
    double acc = 0.0;
    for (const auto& x : w) acc += x.amplitude * x.frequency * std::cos(x.frequency * t + x.phase);
    return acc;
  };
  return ScalarPath("trig", v, d);
}

ScalarPath ScalarPath::fbm_synthetic(double hurst, int modes, std::uint64_t seed,
                                     double amplitude, double horizon) {
  if (modes < 1 || horizon <= 0.0 || hurst <= 0.0 || hurst >= 1.0)
    throw std::invalid_argument("fbm_synthetic: bad parameters");
  struct Mode {
    double w, a, b;
  };
  auto table = std::make_shared<std::vector<Mode>>();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 1; k <= modes; ++k) {
    const double weight = amplitude * std::pow(double(k), -(hurst + 0.5));
    const double a = gauss(rng), b = gauss(rng);
    table->push_back({2.0 * std::numbers::pi * k / horizon, weight * a, weight * b});
  }
  auto v = [table](double t) {
    double acc = 0.0;
    for (const auto& m : *table) acc += m.a * std::sin(m.w * t) + m.b * (std::cos(m.w * t) - 1.0);
    return acc;
  };
  auto d = [table](double t) {
    double acc = 0.0;
    for (const auto& m : *table) acc += m.w * (m.a * std::cos(m.w * t) - m.b * std::sin(m.w * t));
    return acc;
  };
  return ScalarPath("fbm-synthetic", v, d);
}

ScalarPath ScalarPath::scaled(double s) const {
  auto v = value_;
  auto d = deriv_;
  return ScalarPath(kind_, [v, s](double t) { return s * v(t); },
                    [d, s](double t) { return s * d(t); });
}

}  // namespace pbrp
