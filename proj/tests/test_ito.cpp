#include <cmath>

#include "doctest.h"
#include "pbrp/hopf.hpp"
#include "pbrp/ito.hpp"

using namespace pbrp;

namespace {

const Letter L1 = Letter::base(1), L2 = Letter::base(2);

std::vector<std::size_t> ladder(int coarse, int fine, int top) {
  std::vector<std::size_t> s;
  for (int L = coarse; L <= fine; ++L) s.push_back(std::size_t(1) << (top - L));
  return s;
}

ItoOptions options(double alpha, int coarse, int fine, int top) {
  ItoOptions o;
  o.alpha = alpha;
  o.strides = ladder(coarse, fine, top);
  return o;
}

DriverSpec linear(double c) {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1})};
  if (c != 0.0) s.intensities.emplace_back(tddeux(L1, L1), ScalarPath::polynomial({0, c}));
  return s;
}

DriverSpec geometric2() {
  DriverSpec s;
  s.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}}), ScalarPath::trig({{0.5, 7.0, 0.0}, {0.3, 2.0, 1.0}})};
  return s;
}

DriverSpec perturbed2() {
  DriverSpec s = geometric2();
  s.intensities.emplace_back(tddeux(L1, L2), ScalarPath::trig({{0.4, 2.0, 0.0}}));
  s.intensities.emplace_back(tddeux(L2, L2), ScalarPath::polynomial({0, -0.5}));
  return s;
}

DriverSpec perturbed3() {
  DriverSpec s = perturbed2();
  s.intensities.emplace_back(tdtroisun(L1, L2, L1), ScalarPath::polynomial({0, 0.3}));
  s.intensities.emplace_back(ladder3(L2, L1, L2), ScalarPath::trig({{0.2, 1.0, 0.5}}));
  return s;
}

// the same driver with the two letters exchanged
DriverSpec swapped(const DriverSpec& s) {
  auto flip = [](Letter a) { return a.is_bracket() ? a : Letter::base(3 - a.i); };
  std::function<Tree(const Tree&)> relabel = [&](const Tree& t) {
    std::vector<Tree> kids;
    for (const auto& c : t.children()) kids.push_back(relabel(c));
    return Tree(flip(t.root()), std::move(kids));
  };
  DriverSpec out;
  out.letters = {s.letters[1], s.letters[0]};
  for (const auto& [t, p] : s.intensities) out.intensities.emplace_back(relabel(t), p);
  return out;
}

SmoothFunction shifted(const SmoothFunction& F, Eigen::VectorXd xi) {
  return SmoothFunction(F.in_dim(), F.out_dim(), [F, xi](const JetVec& y) {
    JetVec z = y;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += Jet(xi(static_cast<Eigen::Index>(i)));
    return F(z);
  });
}

VectorFieldFamily ones(int d) {
  VectorFieldFamily f;
  for (int i = 0; i < d; ++i) f.fields.push_back(builtin::constant(Eigen::VectorXd::Ones(1), 1));
  return f;
}

VectorFieldFamily fields2() {
  return {{builtin::sin_field(Eigen::Vector2d(0.5, -0.3), Eigen::Vector2d(0.2, 1.0)),
           builtin::affine((Eigen::Matrix2d() << 0.4, -0.2, 0.1, 0.3).finished(), Eigen::Vector2d(0, 0.1))}};
}

double term(const ItoReport& r, std::size_t q) { return r.terms[q].values.back()(0); }

}  // namespace

TEST_CASE("threshold") {
  CHECK(ito_threshold(2, 0.45) == doctest::Approx(0.35));
  CHECK(ito_threshold(3, 0.3) == doctest::Approx(0.2));
}

TEST_CASE("analytic instance: int 2X dX vanishes, the bracket term carries everything") {
  auto X = lift(linear(-0.5), 2, uniform_grid(1.0, 4096));
  auto r = verify_simple_N2(X, builtin::power_sum(1, 2, 1.0), options(0.45, 4, 12, 12));
  CHECK(std::abs(term(r, 0)) < 1e-12);
  CHECK(term(r, 1) == doctest::Approx(1.0));
  CHECK(r.lhs.back()(0) == doctest::Approx(1.0));
  CHECK(r.residuals.back() < 1e-6);
  CHECK(r.order >= ito_threshold(2, 0.45) - 0.3);
  CHECK(r.verdict);
  CHECK(r.theorem == "simple-N2");
  CHECK(r.meshes.back() == doctest::Approx(1.0 / 4096));
}

TEST_CASE("constant F gives 0 = 0") {
  auto X = lift(perturbed3(), 3, uniform_grid(1.0, 64));
  auto F = builtin::constant(Eigen::VectorXd::Constant(1, 2.5), 2);
  for (const auto& r : {verify_simple_N3(X, F, options(0.3, 2, 6, 6)),
                        verify_general_N3(X, fields2(), F, Eigen::Vector2d(0.1, 0.2), options(0.3, 2, 6, 6))}) {
    for (double res : r.residuals) CHECK(res == 0.0);
    for (const auto& t : r.terms) CHECK(t.values.back().isZero());
    CHECK(std::isinf(r.order));
    CHECK(r.verdict);
  }
}

TEST_CASE("smooth canonical lift reduces to the chain rule") {
  auto X = lift(geometric2(), 2, uniform_grid(1.0, 2048));
  auto r = verify_simple_N2(X, builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0), options(0.45, 5, 11, 11));
  CHECK(std::abs(term(r, 1)) < 1e-12);
  CHECK(r.residuals.back() < 1e-6);
  CHECK(r.verdict);
  auto X3 = lift(geometric2(), 3, uniform_grid(1.0, 1024));
  auto r3 = verify_simple_N3(X3, builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0), options(0.3, 4, 10, 10));
  CHECK(std::abs(term(r3, 1)) < 1e-12);
  CHECK(std::abs(term(r3, 2)) < 1e-12);
  CHECK(r3.residuals.back() < 1e-6);
}

TEST_CASE("polynomial F of degree N is exact at every mesh") {
  Eigen::MatrixXd Q(2, 2);
  Q << 1, 0.5, -0.3, 2;
  auto X = lift(perturbed2(), 2, uniform_grid(1.0, 256));
  auto r = verify_simple_N2(X, builtin::quadratic(Q, Eigen::Vector2d(1, 1)), options(0.45, 2, 8, 8));
  for (double res : r.residuals) CHECK(res < 1e-12);
  auto X3 = lift(perturbed3(), 3, uniform_grid(1.0, 256));
  auto r3 = verify_simple_N3(X3, builtin::cubic(Eigen::Vector2d(1.0, -2.0), 0.7), options(0.3, 2, 8, 8));
  for (double res : r3.residuals) CHECK(res < 1e-11);
  CHECK(r3.verdict);
}

TEST_CASE("linear F: higher terms vanish termwise") {
  auto X = lift(perturbed3(), 3, uniform_grid(1.0, 64));
  auto F = builtin::affine(Eigen::RowVector2d(2.0, -1.0), Eigen::VectorXd::Zero(1));
  auto r = verify_simple_N3(X, F, options(0.3, 2, 6, 6));
  CHECK(term(r, 1) == 0.0);
  CHECK(term(r, 2) == 0.0);
  CHECK(r.residuals.back() < 1e-13);
  // general: the identity is the solver's own step
  auto g = verify_general_N3(X, fields2(), F, Eigen::Vector2d(0.1, 0.2), options(0.3, 2, 6, 6));
  CHECK(term(g, 1) == 0.0);
  CHECK(term(g, 2) == 0.0);
  CHECK(term(g, 3) == 0.0);
  for (double res : g.residuals) CHECK(res < 1e-13);
}

TEST_CASE("N=3 with only degree-2 intensities agrees with N=2") {
  auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  auto r2 = verify_simple_N2(lift(perturbed2(), 2, uniform_grid(1.0, 2048)), F, options(0.45, 5, 11, 11));
  auto r3 = verify_simple_N3(lift(perturbed2(), 3, uniform_grid(1.0, 2048)), F, options(0.3, 5, 11, 11));
  const double tot2 = term(r2, 0) + term(r2, 1), tot3 = term(r3, 0) + term(r3, 1) + term(r3, 2);
  CHECK(tot2 == doctest::Approx(tot3).epsilon(1e-4));
  CHECK(r3.residuals.back() < r2.residuals.back());
}

TEST_CASE("f = 1 turns the general identity into the simple one shifted by xi") {
  auto F = builtin::sin_wave(Eigen::VectorXd::Constant(1, 1.3), 1.0);
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.25);
  DriverSpec s = linear(0.4);
  s.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}})};  // Y = xi + X - X_0
  SUBCASE("N = 2") {
    auto X = lift(s, 2, uniform_grid(1.0, 512));
    auto g = verify_general_N2(X, ones(1), F, xi, options(0.45, 3, 9, 9));
    auto p = verify_simple_N2(X, shifted(F, xi - X->base_path(0)), options(0.45, 3, 9, 9));
    for (std::size_t m = 0; m < g.residuals.size(); ++m) {
      CHECK(g.residuals[m] == doctest::Approx(p.residuals[m]).epsilon(1e-8));
      for (std::size_t q = 0; q < 2; ++q)
        CHECK(std::abs(g.terms[q].values[m](0) - p.terms[q].values[m](0)) < 1e-8);
    }
  }
  SUBCASE("N = 3") {
    s.intensities.emplace_back(tdtroisun(L1, L1, L1), ScalarPath::polynomial({0, 0.2}));
    auto X = lift(s, 3, uniform_grid(1.0, 512));
    auto g = verify_general_N3(X, ones(1), F, xi, options(0.3, 3, 9, 9));
    auto p = verify_simple_N3(X, shifted(F, xi - X->base_path(0)), options(0.3, 3, 9, 9));
    CHECK(term(g, 3) == 0.0);
    for (std::size_t m = 0; m < g.residuals.size(); ++m)
      CHECK(std::abs(g.residuals[m] - p.residuals[m]) < 1e-6);
  }
}

TEST_CASE("general identities converge") {
  auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  const Eigen::Vector2d xi(0.3, -0.2);
  SUBCASE("N = 2, geometric") {
    auto X = lift(geometric2(), 2, uniform_grid(1.0, 1024));
    auto r = verify_general_N2(X, fields2(), F, xi, options(0.45, 4, 10, 10));
    CHECK(std::abs(term(r, 1)) < 1e-12);
    CHECK(r.order >= ito_threshold(2, 0.45) - 0.3);
    CHECK(r.residuals.back() < r.residuals.front());
  }
  SUBCASE("N = 3, degree-3 intensities") {
    auto X = lift(perturbed3(), 3, uniform_grid(1.0, 1024), {8, 2, 0.3});
    auto r = verify_general_N3(X, fields2(), F, xi, options(0.3, 4, 10, 10));
    CHECK(r.order >= ito_threshold(3, 0.3) - 0.3);
    CHECK(r.residuals.back() < 1e-4);
    CHECK(r.terms.size() == 4);
    CHECK(r.terms[3].name == "D2F:(f,Df:f) dcbarX");
  }
}

TEST_CASE("smooth canonical lift: extension terms vanish along the flow") {
  auto X = lift(geometric2(), 3, uniform_grid(1.0, 1024));
  auto r = verify_general_N3(X, fields2(), builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0),
                             Eigen::Vector2d(0.3, -0.2), options(0.3, 4, 10, 10));
  for (std::size_t q = 1; q < 4; ++q) CHECK(std::abs(term(r, q)) < 1e-12);
  CHECK(r.residuals.back() < 1e-6);
}

TEST_CASE("increment consistency") {
  auto X = lift(perturbed3(), 3, uniform_grid(1.0, 256));
  auto F = builtin::exp_wave(Eigen::Vector2d(0.3, -0.2), 1.0);
  auto run = [&](std::size_t s, std::size_t t) {
    ItoOptions o = options(0.3, 2, 5, 8);
    o.s = s;
    o.t = t;
    return verify_general_N3(X, fields2(), F, Eigen::Vector2d(0.3, -0.2), o);
  };
  auto whole = run(0, 256), left = run(0, 128), right = run(128, 256);
  for (std::size_t m = 0; m < whole.meshes.size(); ++m) {
    const double a = whole.lhs[m](0), b = left.lhs[m](0) + right.lhs[m](0);
    CHECK(std::abs(a - b) < 1e-12);
    for (std::size_t q = 0; q < 4; ++q)
      CHECK(std::abs(whole.terms[q].values[m](0) - left.terms[q].values[m](0) - right.terms[q].values[m](0)) < 1e-9);
  }
}

TEST_CASE("exchanging the two letters leaves the report unchanged") {
  auto F = SmoothFunction(2, 1, [](const JetVec& y) { return JetVec{sin(0.7 * y[0] + 1.1 * y[1]) + y[0] * y[1] * y[1]}; });
  auto Fs = SmoothFunction(2, 1, [](const JetVec& y) { return JetVec{sin(0.7 * y[1] + 1.1 * y[0]) + y[1] * y[0] * y[0]}; });
  auto X = lift(perturbed3(), 3, uniform_grid(1.0, 256));
  auto Xs = lift(swapped(perturbed3()), 3, uniform_grid(1.0, 256));
  auto a = verify_simple_N3(X, F, options(0.3, 2, 8, 8));
  auto b = verify_simple_N3(Xs, Fs, options(0.3, 2, 8, 8));
  for (std::size_t m = 0; m < a.residuals.size(); ++m) {
    CHECK(a.residuals[m] == doctest::Approx(b.residuals[m]).epsilon(1e-9));
    for (std::size_t q = 0; q < 3; ++q) CHECK(a.terms[q].values[m](0) == doctest::Approx(b.terms[q].values[m](0)).epsilon(1e-9));
  }
}

TEST_CASE("worker count does not change the report") {
  auto X = lift(perturbed3(), 3, uniform_grid(1.0, 256));
  auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  ItoOptions o = options(0.3, 2, 8, 8);
  auto a = verify_general_N3(X, fields2(), F, Eigen::Vector2d(0.3, -0.2), o);
  o.jobs = 4;
  auto b = verify_general_N3(X, fields2(), F, Eigen::Vector2d(0.3, -0.2), o);
  CHECK(a.residuals == b.residuals);
  CHECK(a.order == b.order);
}

TEST_CASE("rejected inputs") {
  auto X = lift(perturbed2(), 2, uniform_grid(1.0, 64));
  auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  CHECK_THROWS(verify_simple_N3(X, F, options(0.3, 2, 6, 6)));
  CHECK_THROWS(verify_simple_N2(X, F, options(0.45, 4, 6, 6)));     // three meshes
  ItoOptions o = options(0.45, 2, 6, 6);
  o.strides = {16, 8, 2, 1, 3};
  CHECK_THROWS(verify_simple_N2(X, F, o));
  o = options(0.45, 2, 6, 6);
  o.s = 30;
  o.t = 20;
  CHECK_THROWS(verify_simple_N2(X, F, o));
  CHECK_THROWS(verify_simple_N2(X, builtin::identity(1), options(0.45, 2, 6, 6)));
  CHECK_THROWS(verify_general_N2(X, ones(1), F, Eigen::Vector2d(0, 0), options(0.45, 2, 6, 6)));
}
