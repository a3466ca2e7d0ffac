#include <cmath>

#include "doctest.h"
#include "pbrp/calculus.hpp"
#include "pbrp/hopf.hpp"

using namespace pbrp;

namespace {

const Letter L1 = Letter::base(1), L2 = Letter::base(2);

DriverSpec trig2() {
  DriverSpec s;
  s.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}}), ScalarPath::trig({{0.5, 7.0, 0.0}, {0.3, 2.0, 1.0}})};
  s.intensities.emplace_back(tddeux(L1, L2), ScalarPath::trig({{0.4, 2.0, 0.0}}));
  s.intensities.emplace_back(tddeux(L2, L2), ScalarPath::polynomial({0, -0.5}));
  return s;
}

SmoothFunction shifted(const SmoothFunction& F, Eigen::VectorXd xi) {
  return SmoothFunction(F.in_dim(), F.out_dim(), [F, xi](const JetVec& y) {
    JetVec z = y;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += Jet(xi(static_cast<Eigen::Index>(i)));
    return F(z);
  });
}

double max_remainder(const ControlledPath& Y, const Forest& tau, std::size_t len) {
  double m = 0.0;
  for (std::size_t a = 0; a + len < Y.count(); a += len)
    m = std::max(m, Y.remainder(tau, Y.xnode(a), Y.xnode(a + len)).lpNorm<Eigen::Infinity>());
  return m;
}

}  // namespace

TEST_CASE("layout and indexing") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 16));
  ControlledPath Y(X, 2, 4);
  CHECK(Y.count() == 5);
  CHECK(Y.forests().size() == 11);  // e, two dots, four pairs of dots, four two-vertex trees
  CHECK(Y.forests().front().empty());
  CHECK(Y.xnode(3) == 12);
  CHECK(Y.slot(8) == 2);
  CHECK_THROWS(Y.slot(6));
  CHECK_THROWS(Y.slot(20));
  CHECK(Y.coeff(Forest(tddeux(L1, L2)), 4).isZero());
  CHECK_THROWS(Y.coeff(Forest(ladder3(L1, L1, L1)), 4));
  CHECK_THROWS(ControlledPath(X, 1, 3));
  CHECK_THROWS(ControlledPath(X, 0, 1));
  CHECK_THROWS(ControlledPath(nullptr, 1, 1));
}

TEST_CASE("F(X) for a linear F has vanishing remainders") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 32));
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, -0.5, 3;
  auto Z = compose_FX(X, builtin::affine(A, Eigen::Vector2d(1, 0)));
  CHECK(Z.coeff(dots({L1}), 0).isApprox(A.col(0)));
  CHECK(Z.coeff(dots({L2, L1}), 0).isZero());
  for (const auto& tau : Z.forests())
    for (std::size_t s = 0; s < 32; s += 5) CHECK(Z.remainder(tau, s, 32).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("F(X) coefficients") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 8));
  Eigen::MatrixXd Q(2, 2);
  Q << 1, 0.5, -0.3, 2;
  auto F = builtin::quadratic(Q, Eigen::Vector2d(1, 1));
  auto Z = compose_FX(X, F, 2);
  const Eigen::VectorXd x = X->base_path(4);
  CHECK(Z.value(4)(0) == doctest::Approx(F(x)(0)));
  const Eigen::MatrixXd H = Q + Q.transpose();
  CHECK(Z.coeff(dots({L1}), 4)(0) == doctest::Approx((H * x)(0) + 1));
  CHECK(Z.coeff(dots({L1, L2}), 4)(0) == doctest::Approx(H(0, 1)));
  CHECK(Z.coeff(Forest(tddeux(L1, L2)), 4).isZero());
}

TEST_CASE("F(Y) with the identity reproduces Y") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 16));
  VectorFieldFamily f{{builtin::sin_field(Eigen::Vector2d(0.5, -0.3), Eigen::Vector2d(0.2, 1.0)),
                       builtin::affine(Eigen::Matrix2d::Identity() * 0.4, Eigen::Vector2d(0, 0.1))}};
  auto Y = solve_rde(X, f, Eigen::Vector2d(0.3, -0.2));
  auto Z = compose_FY(Y, builtin::identity(2));
  for (std::size_t q = 0; q < Y.forests().size(); ++q) CHECK((Z.samples(q) - Y.samples(q)).isZero(1e-15));
}

TEST_CASE("F(Y) on a path with only tree coefficients") {
  // Y = F0(X) seen as a controlled path: <e_i e_j, F(Y)> = D^2F(Y):(Y_i, Y_j) + DF(Y):Y_ij
  auto X = lift(trig2(), 3, uniform_grid(1.0, 8));
  auto Y = compose_FX(X, builtin::sin_field(Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d::Zero()));
  auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  auto Z = compose_FY(Y, F);
  const Eigen::VectorXd u = Y.value(3);
  const Eigen::VectorXd a = Y.coeff(dots({L1}), 3), b = Y.coeff(dots({L2}), 3);
  const Eigen::VectorXd ab = Y.coeff(dots({L1, L2}), 3);
  CHECK(Z.coeff(dots({L1}), 3)(0) == doctest::Approx(F.derivative(u, {a})(0)));
  CHECK(Z.coeff(dots({L1, L2}), 3)(0) ==
        doctest::Approx(F.derivative(u, {a, b})(0) + F.derivative(u, {ab})(0)));
  // F(Y) of F0(X) is (F o F0)(X)
  auto FF = SmoothFunction(2, 1, [F](const JetVec& y) {
    JetVec z = {sin(y[0]), 0.5 * sin(y[1])};
    return F(z);
  });
  auto W = compose_FX(X, FF);
  for (std::size_t q = 0; q < Z.forests().size(); ++q) CHECK((Z.samples(q) - W.samples(q)).isZero(1e-12));
}

TEST_CASE("re-pointing at the bracket extension keeps remainders") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 32));
  auto Xh = bracket_extension(*X);
  auto Z = compose_FX(X, builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0));
  auto Zh = Z.against(Xh);
  for (const auto& tau : Z.forests())
    for (std::size_t s = 0; s <= 32; s += 4)
      for (std::size_t t = s; t <= 32; t += 8)
        CHECK((Z.remainder(tau, s, t) - Zh.remainder(tau, s, t)).lpNorm<Eigen::Infinity>() < 1e-12);
  auto other = lift(trig2(), 3, uniform_grid(2.0, 32));
  CHECK_THROWS(Z.against(other));
  CHECK_THROWS(Z.against(lift(trig2(), 2, uniform_grid(1.0, 32))));
}

TEST_CASE("integral lift") {
  auto X = lift(trig2(), 3, uniform_grid(1.0, 64));
  auto Y = compose_FX(X, builtin::sin_field(Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(0.3, 0.0)), 2);
  auto Z = lift_integral(Y, L2);
  CHECK(Z.value(0).isZero());
  CHECK(Z.value(64).isApprox(rough_integral(Y, *X, L2, 0, 64, 2)));
  for (std::size_t k = 0; k <= 64; k += 2) {
    CHECK(Z.coeff(dots({L2}), k) == Y.value(k));
    CHECK(Z.coeff(Forest(tddeux(L2, L1)), k) == Y.coeff(dots({L1}), k));
    CHECK(Z.coeff(dots({L1}), k).isZero());
  }
  CHECK_THROWS(lift_integral(Y, Letter::bracket(1, 2)));
}

TEST_CASE("remainders shrink at the controlled rate") {
  const double alpha = 0.3;
  auto X = lift(trig2(), 3, uniform_grid(1.0, 1024), {8, 2, alpha});
  const std::vector<int> levels = {2, 3, 4, 5, 6};
  auto check_all = [&](const ControlledPath& Y) {
    for (const auto& tau : Y.forests()) {
      const double want = (3 - int(tau.degree())) * alpha - 0.2;
      CHECK(remainder_rate(Y, tau, levels) >= want);
    }
  };
  check_all(compose_FX(X, builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0)));
  VectorFieldFamily f{{builtin::sin_field(Eigen::Vector2d(0.5, -0.3), Eigen::Vector2d(0.2, 1.0)),
                       builtin::affine(Eigen::Matrix2d::Identity() * 0.4, Eigen::Vector2d(0, 0.1))}};
  auto Y = solve_rde(X, f, Eigen::Vector2d(0.3, -0.2));
  check_all(Y);
  check_all(compose_FY(Y, shifted(builtin::exp_wave(Eigen::Vector2d(0.3, 0.2), 1.0), Eigen::Vector2d(0.1, 0))));
  check_all(lift_integral(Y, L1));
  CHECK_THROWS(remainder_rate(Y, Forest(), {1, 2, 3}));
  // remainder of the unit over one cell is the increment minus its Taylor part
  CHECK(max_remainder(Y, Forest(), 1) < max_remainder(Y, Forest(), 4));
}
