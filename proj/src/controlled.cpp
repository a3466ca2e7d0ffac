#include "pbrp/controlled.hpp"

#include <cmath>
#include <stdexcept>

#include "pbrp/hopf.hpp"
#include "pbrp/stats.hpp"

namespace pbrp {

ControlledPath::ControlledPath(RoughPathPtr X, int n, std::size_t stride)
    : X_(std::move(X)), n_(n), stride_(stride) {
  if (!X_) throw std::invalid_argument("controlled path: no rough path");
  if (n_ < 1) throw std::invalid_argument("controlled path: dimension must be >= 1");
  if (stride_ < 1 || X_->cells() % stride_ != 0)
    throw std::invalid_argument("controlled path: stride must divide the number of cells");
  count_ = X_->cells() / stride_ + 1;
  const int N = X_->truncation();
  forests_ = enumerate_forests(base_letters(X_->dimension()), N - 1);
  coef_.assign(forests_.size(), Eigen::MatrixXd::Zero(n_, static_cast<Eigen::Index>(count_)));

  // <X (x) tau, D sigma> collects the terms of D sigma with right leg tau
  transport_.resize(forests_.size());
  const auto& B = X_->basis();
  for (std::size_t s = 0; s < forests_.size(); ++s)
    for (const auto& [k, c] : coproduct_mkw(forests_[s]).terms()) {
      auto tau = forest_index(k.second);
      if (!tau) throw std::logic_error("controlled path: right leg outside the truncation");
      transport_[*tau].push_back({s, B.index(k.first), double(c)});
    }
}

std::size_t ControlledPath::slot(std::size_t xnode) const {
  if (xnode % stride_ != 0 || xnode / stride_ >= count_)
    throw std::out_of_range("controlled path: node " + std::to_string(xnode) + " is not sampled");
  return xnode / stride_;
}

std::optional<std::size_t> ControlledPath::forest_index(const Forest& f) const {
  auto it = std::lower_bound(forests_.begin(), forests_.end(), f);
  if (it == forests_.end() || !(*it == f)) return std::nullopt;
  return static_cast<std::size_t>(it - forests_.begin());
}

Eigen::VectorXd ControlledPath::coeff(const Forest& tau, std::size_t xnode) const {
  if (tau.degree() >= truncation())
    throw std::invalid_argument("controlled path: forest of degree >= N: " + tau.key());
  auto k = forest_index(tau);
  if (!k) return Eigen::VectorXd::Zero(n_);
  return coeff(*k, xnode);
}

ControlledPath ControlledPath::against(RoughPathPtr other) const {
  if (!other || other->grid() != X_->grid())
    throw std::invalid_argument("controlled path: rough path on a different grid");
  if (other->truncation() != X_->truncation())
    throw std::invalid_argument("controlled path: truncation mismatch");
  for (int i = 1; i <= X_->dimension(); ++i)
    if (!other->basis().has_letter(Letter::base(i)))
      throw std::invalid_argument("controlled path: rough path lacks base letters");
  ControlledPath out(std::move(other), n_, stride_);
  if (out.forests_ != forests_) throw std::invalid_argument("controlled path: alphabet mismatch");
  out.coef_ = coef_;
  return out;
}

Eigen::VectorXd ControlledPath::remainder(const Forest& tau, std::size_t s, std::size_t t) const {
  if (tau.degree() >= truncation())
    throw std::invalid_argument("remainder: forest of degree >= N: " + tau.key());
  if (s > t) throw std::invalid_argument("remainder: s > t");
  auto k = forest_index(tau);
  if (!k) throw std::invalid_argument("remainder: forest outside the alphabet: " + tau.key());
  const Eigen::VectorXd g = X_->character(s, t);
  Eigen::VectorXd r = coeff(*k, t);
  const Eigen::Index a = static_cast<Eigen::Index>(slot(s));
  for (const auto& tr : transport_[*k]) r -= (tr.c * g(tr.word)) * coef_[tr.sigma].col(a);
  return r;
}

ControlledPath compose_FX(RoughPathPtr X, const SmoothFunction& F, std::size_t stride) {
  const int d = X->dimension();
  if (F.in_dim() != d) throw std::invalid_argument("compose_FX: F must act on R^d");
  const int N = X->truncation();
  ControlledPath Z(X, F.out_dim(), stride);
  std::vector<std::size_t> single_idx(d);
  std::vector<std::vector<std::size_t>> pair_idx(d, std::vector<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    single_idx[i] = *Z.forest_index(dots({Letter::base(i + 1)}));
    if (N >= 3)
      for (int j = 0; j < d; ++j)
        pair_idx[i][j] = *Z.forest_index(dots({Letter::base(i + 1), Letter::base(j + 1)}));
  }
  for (std::size_t k = 0; k < Z.count(); ++k) {
    const Eigen::VectorXd x = X->base_path(Z.xnode(k));
    Z.set(0, k, F(x));
    for (int i = 0; i < d; ++i) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i);
      Z.set(single_idx[i], k, F.derivative(x, {ei}));
      if (N < 3) continue;
      for (int j = 0; j < d; ++j)
        Z.set(pair_idx[i][j], k, F.derivative(x, {ei, Eigen::VectorXd::Unit(d, j)}));
    }
  }
  return Z;
}

namespace {

// ordered splittings of [0, q) into m consecutive nonempty blocks
void splittings(std::size_t q, std::size_t m, std::vector<std::size_t>& cuts,
                std::vector<std::vector<std::size_t>>& out) {
  if (cuts.size() + 1 == m) {
    out.push_back(cuts);
    return;
  }
  const std::size_t from = cuts.empty() ? 1 : cuts.back() + 1;
  for (std::size_t c = from; c < q; ++c) {
    cuts.push_back(c);
    splittings(q, m, cuts, out);
    cuts.pop_back();
  }
}

}  // namespace

ControlledPath compose_FY(const ControlledPath& Y, const SmoothFunction& F) {
  if (F.in_dim() != Y.dim()) throw std::invalid_argument("compose_FY: F must act on R^n");
  const int N = Y.truncation();
  ControlledPath Z(Y.rough_path_ptr(), F.out_dim(), Y.stride());
  const auto& fs = Y.forests();

  // for each forest: list of splittings, each a list of block forest indices
  std::vector<std::vector<std::vector<std::size_t>>> plan(fs.size());
  for (std::size_t f = 1; f < fs.size(); ++f) {
    const std::size_t q = fs[f].size();
    for (std::size_t m = 1; m <= std::min<std::size_t>(q, N - 1); ++m) {
      std::vector<std::vector<std::size_t>> cutsets;
      std::vector<std::size_t> cuts;
      splittings(q, m, cuts, cutsets);
      for (const auto& cs : cutsets) {
        std::vector<std::size_t> blocks;
        std::size_t lo = 0;
        for (std::size_t b = 0; b <= cs.size(); ++b) {
          std::size_t hi = b < cs.size() ? cs[b] : q;
          blocks.push_back(*Y.forest_index(fs[f].slice(lo, hi)));
          lo = hi;
        }
        plan[f].push_back(std::move(blocks));
      }
    }
  }

  for (std::size_t k = 0; k < Y.count(); ++k) {
    const std::size_t x = Y.xnode(k);
    const Eigen::VectorXd u = Y.value(x);
    Z.set(0, k, F(u));
    for (std::size_t f = 1; f < fs.size(); ++f) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(F.out_dim());
      for (const auto& blocks : plan[f]) {
        std::vector<Eigen::VectorXd> v;
        bool zero = false;
        for (auto b : blocks) {
          v.push_back(Y.coeff(b, x));
          zero = zero || v.back().isZero(0.0);
        }
        if (!zero) acc += F.derivative(u, v);
      }
      Z.set(f, k, acc);
    }
  }
  return Z;
}

Eigen::VectorXd integral_germ(const ControlledPath& Y, const RoughPath& X, Letter a,
                              std::size_t s, std::size_t t) {
  if (X.grid() != Y.rough_path().grid())
    throw std::invalid_argument("integral: rough path on a different grid");
  if (!X.basis().has_letter(a)) throw std::invalid_argument("integral: letter outside the alphabet");
  const Eigen::VectorXd g = X.character(s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Y.dim());
  for (std::size_t f = 0; f < Y.forests().size(); ++f)
    out += g(X.basis().index(Forest(b_plus(Y.forests()[f], a)))) * Y.coeff(f, s);
  return out;
}

ControlledPath lift_integral(const ControlledPath& Y, Letter a) {
  if (a.is_bracket() || a.i > Y.rough_path().dimension())
    throw std::invalid_argument("lift_integral: letter must be a base letter of X");
  ControlledPath Z(Y.rough_path_ptr(), Y.dim(), Y.stride());
  const int N = Y.truncation();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(Y.dim());
  for (std::size_t k = 0; k < Y.count(); ++k) {
    if (k > 0) acc += integral_germ(Y, Y.rough_path(), a, Y.xnode(k - 1), Y.xnode(k));
    Z.set(0, k, acc);
    for (std::size_t f = 0; f < Y.forests().size(); ++f) {
      if (Y.forests()[f].degree() > N - 2) continue;
      Z.set(*Z.forest_index(Forest(b_plus(Y.forests()[f], a))), k, Y.coeff(f, Y.xnode(k)));
    }
  }
  return Z;
}

double remainder_rate(const ControlledPath& Y, const Forest& tau, const std::vector<int>& levels,
                      double floor) {
  if (levels.size() < 4) throw std::invalid_argument("remainder_rate: need >= 4 scales");
  const auto& grid = Y.rough_path().grid();
  std::vector<double> h, m;
  for (int L : levels) {
    const std::size_t len = std::size_t(1) << L;
    if (L < 0 || len >= Y.count()) throw std::out_of_range("remainder_rate: scale outside grid");
    double best = 0.0;
    for (std::size_t a = 0; a + len < Y.count(); a += len)
      best = std::max(best, Y.remainder(tau, Y.xnode(a), Y.xnode(a + len)).lpNorm<Eigen::Infinity>());
    h.push_back(grid[Y.xnode(len)] - grid[0]);
    m.push_back(best);
  }
  return loglog_slope(h, m, floor);
}

}  // namespace pbrp
