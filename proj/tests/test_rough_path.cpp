#include <cmath>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "pbrp/hopf.hpp"
#include "pbrp/rough_path.hpp"

using namespace pbrp;

namespace {

const Letter L1 = Letter::base(1), L2 = Letter::base(2);

// polynomial in t, coefficients low to high
using Poly = std::vector<double>;

Poly add(Poly a, const Poly& b, double s = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += s * b[k];
  return a;
}
Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}
Poly integrate(const Poly& a) {
  Poly out(a.size() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) out[k + 1] = a[k] / double(k + 1);
  return out;
}
double at(const Poly& a, double t) {
  double v = 0;
  for (std::size_t k = a.size(); k-- > 0;) v = v * t + a[k];
  return v;
}

// Iterated integrals of a polynomial path from 0:
//   d/dt <X, w' [w'']_a> = <X, w' sh w''> dX^a/dt
Poly iterated(const Forest& f, const std::vector<Poly>& dX) {
  if (f.empty()) return {1.0};
  const Tree& last = f.trees().back();
  Forest prefix = f.slice(0, f.size() - 1);
  Forest kids(last.children());
  Poly inner{0.0};
  for (const auto& [g, c] : shuffle(prefix, kids).terms()) inner = add(inner, iterated(g, dX), double(c));
  return integrate(mul(inner, dX[last.root().i - 1]));
}

DriverSpec poly_spec() {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1}), ScalarPath::polynomial({0, 0, 1})};
  return s;
}

DriverSpec linear_with_intensity(double c) {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1})};
  s.intensities.emplace_back(tddeux(L1, L1), ScalarPath::polynomial({0, c}));
  return s;
}

}  // namespace

TEST_CASE("canonical lift of (t, t^2) matches iterated integrals") {
  auto X = lift(poly_spec(), 3, uniform_grid(1.0, 1));
  std::vector<Poly> dX = {{1.0}, {0.0, 2.0}};
  for (const auto& f : X->basis().forests()) {
    double want = at(iterated(f, dX), 1.0);
    double got = X->eval(0.0, 1.0, f);
    INFO(f.key());
    CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
  }
  CHECK(X->eval(0.0, 1.0, Forest(tddeux(L2, L1))) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(X->eval(0.0, 1.0, Forest(tddeux(L1, L2))) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("X = t without intensities") {
  auto X = lift(DriverSpec{{ScalarPath::polynomial({0, 1})}, {}, {}}, 3, uniform_grid(2.0, 8));
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(X->eval(0.0, t, Forest(tddeux(L1, L1))) == doctest::Approx(t * t / 2));
    CHECK(X->eval(0.0, t, dots({L1, L1})) == doctest::Approx(t * t / 2));
    CHECK(X->eval(0.0, t, dots({L1})) == doctest::Approx(t));
    CHECK(X->eval(0.0, t, Forest()) == 1.0);
  }
  CHECK(X->eval(0.25, 0.25, Forest()) == 1.0);
  CHECK(X->eval(0.25, 0.25, dots({L1})) == 0.0);
  CHECK_THROWS(X->eval(1.0, 0.5, dots({L1})));
  CHECK_THROWS(X->eval(0.1, 0.5, dots({L1})));
}

TEST_CASE("tree intensity against the truncated exponential") {
  const double c = 0.7;
  auto X = lift(linear_with_intensity(c), 3, uniform_grid(1.0, 4));
  // independent oracle: exp(t e1 + c t [e1]_1) in the truncated dual algebra
  auto T = tables_for(base_letters(1), 3);
  for (double t : {0.25, 1.0}) {
    Series<double> x;
    x.add(dots({L1}), t);
    x.add(Forest(tddeux(L1, L1)), c * t);
    Series<double> g{Forest{}}, term{Forest{}};
    for (int p = 1; p <= 3; ++p) {
      term = T->star(term, x);
      term *= 1.0 / p;
      g += term;
    }
    for (const auto& f : X->basis().forests()) CHECK(X->eval(0.0, t, f) == doctest::Approx(g.coeff(f)).epsilon(1e-10));
    CHECK(X->eval(0.0, t, Forest(tddeux(L1, L1))) == doctest::Approx(t * t / 2 + c * t));
    CHECK(X->eval(0.0, t, dots({L1, L1})) == doctest::Approx(t * t / 2));
  }
}

TEST_CASE("Chen and character residuals") {
  std::vector<DriverSpec> specs;
  specs.push_back(poly_spec());
  DriverSpec trig;
  trig.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}}), ScalarPath::trig({{0.5, 7.0, 0.0}, {0.2, 2.0, 1.0}})};
  trig.intensities.emplace_back(tddeux(L1, L2), ScalarPath::polynomial({0, 0.3}));
  trig.intensities.emplace_back(tdtroisun(L2, L1, L1), ScalarPath::trig({{0.4, 1.0, 0.0}}));
  specs.push_back(trig);
  DriverSpec rough;
  rough.letters = {ScalarPath::fbm_synthetic(0.4, 32, 5, 1.0, 1.0), ScalarPath::fbm_synthetic(0.4, 32, 6, 1.0, 1.0)};
  specs.push_back(rough);
  std::mt19937_64 rng(42);
  for (const auto& spec : specs) {
    auto X = lift(spec, 3, uniform_grid(1.0, 64), {16, 2, 0.3});
    const auto& F = X->basis().forests();
    std::uniform_int_distribution<std::size_t> node(0, X->cells()), pick(0, F.size() - 1);
    double worst = 0.0, worst_char = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
      std::size_t a = node(rng), b = node(rng), u = node(rng);
      if (a > b) std::swap(a, b);
      u = a + (b > a ? u % (b - a + 1) : 0);
      worst = std::max(worst, chen_residual(*X, a, u, b, F[pick(rng)]));
      const Forest& s = F[pick(rng)];
      const Forest& t = F[pick(rng)];
      if (s.degree() + t.degree() <= 3) worst_char = std::max(worst_char, character_residual(*X, a, b, s, t));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_char < 1e-10);
    CHECK(chen_residual(*X, 3, 3, 9, F.back()) == 0.0);
    CHECK(chen_residual(*X, 3, 9, 9, F.back()) == 0.0);
    CHECK(character_residual(*X, 0, 7, Forest(), F[5]) == 0.0);
  }
}

TEST_CASE("parallel lift is identical to the serial one") {
  DriverSpec s = poly_spec();
  s.intensities.emplace_back(tddeux(L2, L1), ScalarPath::trig({{1.0, 2.0, 0.0}}));
  auto A = lift(s, 3, uniform_grid(1.0, 37), {8, 1, 0.3});
  auto B = lift(s, 3, uniform_grid(1.0, 37), {8, 4, 0.3});
  for (std::size_t k = 0; k < A->cells(); ++k) CHECK(A->steps()[k] == B->steps()[k]);
}

TEST_CASE("lift rejects bad input") {
  auto g = uniform_grid(1.0, 4);
  CHECK_THROWS(lift(poly_spec(), 4, g));
  CHECK_THROWS(lift(poly_spec(), 2, {0.0, 0.5, 0.5}));
  DriverSpec s = poly_spec();
  s.intensities.emplace_back(ladder3(L1, L1, L1), ScalarPath::polynomial({0, 1}));
  CHECK_THROWS(lift(s, 2, g));
  s.intensities.clear();
  s.intensities.emplace_back(Tree(L1, {}), ScalarPath::polynomial({0, 1}));
  CHECK_THROWS(lift(s, 2, g));
  CHECK_THROWS(lift(poly_spec(), 2, g, {0, 1, 0.45}));
}

TEST_CASE("Hoelder slopes") {
  auto X = lift(DriverSpec{{ScalarPath::polynomial({0, 1})}, {}, {}}, 2, uniform_grid(1.0, 256));
  std::vector<int> lv = {0, 1, 2, 3, 4};
  CHECK(holder_slope(*X, dots({L1}), lv) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(holder_slope(*X, Forest(tddeux(L1, L1)), lv) == doctest::Approx(2.0).epsilon(0.05));
  auto Y = lift(linear_with_intensity(1.0), 2, uniform_grid(1.0, 256));
  CHECK(holder_slope(*Y, Forest(tddeux(L1, L1)), lv) == doctest::Approx(1.0).epsilon(0.1));
  CHECK_THROWS(holder_slope(*X, dots({L1}), {0, 1, 2}));
  auto Z = lift(DriverSpec{{ScalarPath::polynomial({0, 1}), ScalarPath::zero()}, {}, {}}, 2, uniform_grid(1.0, 64));
  CHECK(std::isinf(holder_slope(*Z, dots({L2}), lv)));
}

TEST_CASE("bracket extension") {
  SUBCASE("geometric lift has vanishing brackets") {
    auto X = lift(poly_spec(), 3, uniform_grid(1.0, 16));
    auto Xh = bracket_extension(*X);
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) CHECK(std::abs(bracket_path(Xh, i, j)(0, 16)) < 1e-12);
    // restriction to A-decorated forests
    for (const auto& f : X->basis().forests()) CHECK(std::abs(Xh->eval(0.0, 1.0, f) - X->eval(0.0, 1.0, f)) < 1e-12);
  }
  SUBCASE("intensity c gives -ct") {
    const double c = 0.6;
    auto X = lift(linear_with_intensity(c), 3, uniform_grid(1.0, 8));
    auto Xh = bracket_extension(*X);
    auto br = bracket_path(Xh, 1, 1);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(br(0, k) == doctest::Approx(-c * k / 8.0));
    // <Xhat, (11)> = <X, e1 e1 - [e1]_1>
    auto want = X->eval(0.0, 0.5, dots({L1, L1})) - X->eval(0.0, 0.5, Forest(tddeux(L1, L1)));
    CHECK(br(0, 4) == doctest::Approx(want));
    auto tl = tilde_path(Xh, 1, 1, 1);
    CHECK(tl(3, 3) == 0.0);
    // the ladder intensity enters [e e]_1 and [e]_(11) with opposite signs
    CHECK(std::abs(tl(0, 8)) < 1e-12);
  }
  SUBCASE("a cherry intensity shows up in the tilde path") {
    DriverSpec s = linear_with_intensity(0.6);
    s.intensities.emplace_back(tdtroisun(L1, L1, L1), ScalarPath::polynomial({0, 0.25}));
    auto Xh = bracket_extension(*lift(s, 3, uniform_grid(1.0, 8)));
    auto tl = tilde_path(Xh, 1, 1, 1);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(tl(0, k) == doctest::Approx(-0.25 * k / 8.0));
  }
  SUBCASE("extension paths are additive") {
    DriverSpec s;
    s.letters = {ScalarPath::fbm_synthetic(0.4, 16, 1, 1.0, 1.0), ScalarPath::trig({{1.0, 5.0, 0.3}})};
    s.intensities.emplace_back(tddeux(L1, L2), ScalarPath::trig({{0.5, 3.0, 0.0}}));
    s.intensities.emplace_back(tddeux(L2, L2), ScalarPath::polynomial({0, -0.5}));
    auto X = lift(s, 3, uniform_grid(1.0, 32), {8, 2, 0.3});
    auto Xh = bracket_extension(*X, 2);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> node(0, 32);
    for (int probe = 0; probe < 50; ++probe) {
      std::size_t a = node(rng), u = node(rng), b = node(rng);
      if (a > u) std::swap(a, u);
      if (u > b) std::swap(u, b);
      if (a > u) std::swap(a, u);
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
          auto br = bracket_path(Xh, i, j);
          CHECK(std::abs(br(a, b) - br(a, u) - br(u, b)) < 1e-10);
          for (int k = 1; k <= 2; ++k) {
            auto tl = tilde_path(Xh, i, j, k);
            CHECK(std::abs(tl(a, b) - tl(a, u) - tl(u, b)) < 1e-10);
          }
        }
    }
  }
  SUBCASE("requirements") {
    auto X = lift(poly_spec(), 2, uniform_grid(1.0, 4));
    auto Xh = bracket_extension(*X);
    CHECK_THROWS(tilde_path(Xh, 1, 1, 1));
    auto Y = lift(poly_spec(), 3, uniform_grid(1.0, 4));
    CHECK_THROWS(bracket_path(Y, 1, 2));
    auto Z = std::make_shared<RoughPath>(Y->basis_ptr(), Y->grid(), Y->steps(), Eigen::VectorXd(), 0.3);
    CHECK_THROWS(bracket_extension(*Z));
  }
}

TEST_CASE("c-bar path") {
  SUBCASE("vanishes on a geometric lift") {
    // t^3/2 from the two forests against t^3/6 + t^3/3 from the ladder and cherries
    auto X = lift(DriverSpec{{ScalarPath::polynomial({0, 1})}, {}, {}}, 3, uniform_grid(1.0, 4));
    auto cb = cbar_path(bracket_extension(*X), 1, 1, 1);
    CHECK(std::abs(cb(0, 4)) < 1e-12);
    CHECK(std::abs(cb(1, 3)) < 1e-12);
  }
  SUBCASE("the element without cherries is not additive") {
    auto X = lift(DriverSpec{{ScalarPath::polynomial({0, 1})}, {}, {}}, 3, uniform_grid(1.0, 2));
    auto Xh = bracket_extension(*X);
    const Eigen::VectorXd v = Xh->basis().dense(cbar_element_without_cherries(1, 1, 1));
    auto g = [&](std::size_t a, std::size_t b) { return Xh->character(a, b).dot(v); };
    CHECK(g(0, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(g(0, 1) == doctest::Approx(1.0 / 24.0));
    CHECK(std::abs(g(0, 2) - g(0, 1) - g(1, 2)) > 0.1);
  }
  SUBCASE("additive with intensities of every degree") {
    DriverSpec s;
    s.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}}), ScalarPath::fbm_synthetic(0.4, 16, 3, 1.0, 1.0)};
    s.intensities.emplace_back(tddeux(L1, L2), ScalarPath::polynomial({0, 0.4}));
    s.intensities.emplace_back(tdtroisun(L1, L2, L1), ScalarPath::polynomial({0, 0.3}));
    s.intensities.emplace_back(ladder3(L2, L1, L2), ScalarPath::trig({{0.2, 1.0, 0.5}}));
    auto Xh = bracket_extension(*lift(s, 3, uniform_grid(1.0, 32), {8, 2, 0.3}));
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> node(0, 32);
    for (int probe = 0; probe < 30; ++probe) {
      std::size_t v[3] = {node(rng), node(rng), node(rng)};
      std::sort(v, v + 3);
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          for (int k = 1; k <= 2; ++k) {
            auto cb = cbar_path(Xh, i, j, k);
            CHECK(std::abs(cb(v[0], v[2]) - cb(v[0], v[1]) - cb(v[1], v[2])) < 1e-10);
          }
    }
  }
}
