#include "pbrp/rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "pbrp/hopf.hpp"
#include "pbrp/stats.hpp"

namespace pbrp {

RoughPath::RoughPath(std::shared_ptr<const Basis> basis, std::vector<double> grid,
                     std::vector<Eigen::VectorXd> steps, Eigen::VectorXd x0, double alpha)
    : basis_(std::move(basis)), grid_(std::move(grid)), x0_(std::move(x0)), alpha_(alpha) {
  if (grid_.empty()) throw std::invalid_argument("rough path: empty grid");
  for (std::size_t k = 1; k < grid_.size(); ++k)
    if (!(grid_[k] > grid_[k - 1])) throw std::invalid_argument("rough path: grid not increasing");
  if (steps.size() != cells()) throw std::invalid_argument("rough path: step count mismatch");
  for (auto a : basis_->letters()) d_ += a.is_bracket() ? 0 : 1;
  if (x0_.size() == 0) x0_ = Eigen::VectorXd::Zero(d_);
  if (x0_.size() != d_) throw std::invalid_argument("rough path: x0 dimension mismatch");

  levels_.push_back(std::move(steps));
  while (levels_.back().size() >= 2) {
    const auto& prev = levels_.back();
    std::vector<Eigen::VectorXd> next;
    next.reserve(prev.size() / 2);
    for (std::size_t k = 0; 2 * k + 1 < prev.size(); ++k)
      next.push_back(basis_->star(prev[2 * k], prev[2 * k + 1]));
    levels_.push_back(std::move(next));
  }

  base_.resize(d_, static_cast<Eigen::Index>(grid_.size()));
  std::vector<std::size_t> idx;
  for (int i = 1; i <= d_; ++i) idx.push_back(basis_->letter_index(Letter::base(i)));
  base_.col(0) = x0_;
  for (std::size_t k = 0; k < cells(); ++k)
    for (int i = 0; i < d_; ++i) base_(i, k + 1) = base_(i, k) + levels_[0][k](idx[i]);
}

std::size_t RoughPath::node(double t) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  const double tol = 1e-12 * std::max(1.0, std::abs(grid_.back()));
  std::size_t k = static_cast<std::size_t>(it - grid_.begin());
  if (k < grid_.size() && std::abs(grid_[k] - t) <= tol) return k;
  if (k > 0 && std::abs(grid_[k - 1] - t) <= tol) return k - 1;
  throw std::out_of_range("time is not a grid node");
}

Eigen::VectorXd RoughPath::character(std::size_t a, std::size_t b) const {
  if (a > b) throw std::invalid_argument("rough path: s > t");
  if (b > cells()) throw std::out_of_range("rough path: node out of range");
  Eigen::VectorXd out;
  bool first = true;
  std::size_t pos = a;
  while (pos < b) {
    int L = 0;
    while (L + 1 < levels() && pos % (std::size_t(2) << L) == 0 &&
           pos + (std::size_t(2) << L) <= b)
      ++L;
    const auto& blk = levels_[L][pos >> L];
    if (first) {
      out = blk;
      first = false;
    } else {
      out = basis_->star(out, blk);
    }
    pos += std::size_t(1) << L;
  }
  return first ? basis_->unit() : out;
}

double RoughPath::eval(std::size_t a, std::size_t b, const Forest& w) const {
  if (w.degree() > truncation()) throw std::invalid_argument("rough path: forest above truncation");
  return character(a, b)(basis_->index(w));
}

double RoughPath::eval(double s, double t, const Forest& w) const {
  return eval(node(s), node(t), w);
}

Eigen::VectorXd RoughPath::base_path(std::size_t k) const { return base_.col(k); }

std::vector<double> uniform_grid(double T, std::size_t cells) {
  if (!(T > 0.0)) throw std::invalid_argument("uniform_grid: horizon must be positive");
  std::vector<double> g(cells + 1, 0.0);
  if (cells == 0) return g;
  for (std::size_t k = 0; k <= cells; ++k) g[k] = T * double(k) / double(cells);
  return g;
}

// --- lift -------------------------------------------------------------------

namespace {

struct Driver {
  std::size_t index;
  ScalarPath path;
};

// Sixth-order Magnus step for g' = g * A(t), A at the three Gauss nodes.
// The usual formula is for Y' = A Y; with A acting on
// the right every commutator is taken in the opposite product.
Eigen::VectorXd cell_character(const Basis& B, const std::vector<Driver>& drivers, double t0,
                               double t1, int substeps) {
  const double h = (t1 - t0) / substeps;
  const double r = std::sqrt(15.0) / 10.0;
  const double c[3] = {0.5 - r, 0.5, 0.5 + r};
  auto comm = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return B.reduced_star(y, x) - B.reduced_star(x, y);
  };
  Eigen::VectorXd g = B.unit();
  Eigen::VectorXd A[3];
  for (auto& a : A) a = Eigen::VectorXd::Zero(B.size());
  for (int s = 0; s < substeps; ++s) {
    const double t = t0 + s * h;
    for (const auto& d : drivers)
      for (int q = 0; q < 3; ++q) A[q](d.index) = d.path.derivative(t + c[q] * h);
    const Eigen::VectorXd a1 = h * A[1];
    const Eigen::VectorXd a2 = (std::sqrt(15.0) * h / 3.0) * (A[2] - A[0]);
    const Eigen::VectorXd a3 = (10.0 * h / 3.0) * (A[2] - 2.0 * A[1] + A[0]);
    Eigen::VectorXd omega = a1 + a3 / 12.0;
    if (B.truncation() >= 2) {
      const Eigen::VectorXd c1 = comm(a1, a2);
      const Eigen::VectorXd c2 = comm(a1, 2.0 * a3 + c1) / -60.0;
      omega += comm(-20.0 * a1 - a3 + c1, a2 + c2) / 240.0;
    }
    g = s == 0 ? B.exp(omega) : B.star(g, B.exp(omega));
  }
  return g;
}

}  // namespace

RoughPathPtr lift(const DriverSpec& spec, int N, const std::vector<double>& grid,
                  const LiftOptions& opt) {
  if (N < 1 || N > 3) throw std::invalid_argument("lift: truncation must be 1, 2 or 3");
  if (opt.substeps < 1) throw std::invalid_argument("lift: substeps must be >= 1");
  if (spec.letters.empty()) throw std::invalid_argument("lift: no letter drivers");
  if (grid.empty()) throw std::invalid_argument("lift: empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("lift: grid not increasing");

  const int d = static_cast<int>(spec.letters.size());
  std::vector<Letter> letters = base_letters(d);
  for (const auto& [a, p] : spec.extra) {
    if (!a.is_bracket() || a.i > d || a.j > d)
      throw std::invalid_argument("lift: extra drivers must be bracket letters over 1..d");
    letters.push_back(a);
  }
  auto B = basis_for(letters, N);

  std::vector<Driver> drivers;
  for (int i = 1; i <= d; ++i)
    drivers.push_back({B->letter_index(Letter::base(i)), spec.letters[i - 1]});
  for (const auto& [a, p] : spec.extra) drivers.push_back({B->letter_index(a), p});
  for (const auto& [tree, p] : spec.intensities) {
    if (tree.degree() > N) throw std::invalid_argument("lift: intensity tree above truncation: " + tree.key());
    if (tree.degree() < 2) throw std::invalid_argument("lift: intensity tree of degree < 2: " + tree.key());
    auto k = B->find(Forest(tree));
    if (!k) throw std::invalid_argument("lift: unknown intensity tree: " + tree.key());
    for (const auto& dr : drivers)
      if (dr.index == *k) throw std::invalid_argument("lift: duplicate intensity tree: " + tree.key());
    drivers.push_back({*k, p});
  }

  const std::size_t M = grid.size() - 1;
  std::vector<Eigen::VectorXd> steps(M);
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(M)));
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k)
      steps[k] = cell_character(*B, drivers, grid[k], grid[k + 1], opt.substeps);
  };
  if (jobs <= 1) {
    work(0, M);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work, M * j / jobs, M * (j + 1) / jobs);
    for (auto& th : pool) th.join();
  }

  Eigen::VectorXd x0(d);
  for (int i = 0; i < d; ++i) x0(i) = spec.letters[i](grid.front());
  auto X = std::make_shared<RoughPath>(B, grid, std::move(steps), x0, opt.alpha);
  X->attach_spec(spec, opt.substeps);
  return X;
}

double chen_residual(const RoughPath& X, std::size_t s, std::size_t u, std::size_t t,
                     const Forest& w) {
  if (!(s <= u && u <= t)) throw std::invalid_argument("chen_residual: need s <= u <= t");
  const auto k = X.basis().index(w);
  const auto lhs = X.basis().star(X.character(s, u), X.character(u, t));
  return std::abs(lhs(k) - X.character(s, t)(k));
}

double character_residual(const RoughPath& X, std::size_t s, std::size_t t, const Forest& a,
                          const Forest& b) {
  if (a.degree() + b.degree() > X.truncation())
    throw std::invalid_argument("character_residual: degrees exceed truncation");
  const auto g = X.character(s, t);
  const auto& B = X.basis();
  return std::abs(B.pair(g, shuffle(a, b)) - g(B.index(a)) * g(B.index(b)));
}

double holder_slope(const RoughPath& X, const Forest& w, const std::vector<int>& levels) {
  if (levels.size() < 4) throw std::invalid_argument("holder_slope: need >= 4 scales");
  const auto k = X.basis().index(w);
  std::vector<double> h, m;
  for (int L : levels) {
    if (L < 0 || L >= X.levels()) throw std::out_of_range("holder_slope: scale outside grid");
    double best = 0.0;
    std::size_t nblocks = X.cells() >> L;
    for (std::size_t b = 0; b < nblocks; ++b) best = std::max(best, std::abs(X.block(L, b)(k)));
    const std::size_t len = std::size_t(1) << L;
    h.push_back(X.grid()[len] - X.grid()[0]);
    m.push_back(best);
  }
  return loglog_slope(h, m, 1e-300);
}

RoughPathPtr bracket_extension(const RoughPath& X, int jobs) {
  if (!X.spec()) throw std::invalid_argument("bracket_extension: rough path has no driver spec");
  DriverSpec spec = *X.spec();
  spec.extra.clear();
  const int d = X.dimension();
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      const Tree ladder = tddeux(Letter::base(i), Letter::base(j));
      ScalarPath p = ScalarPath::zero();
      for (const auto& [tree, lam] : spec.intensities)
        if (tree == ladder) p = lam.scaled(-1.0);
      spec.extra.emplace_back(Letter::bracket(i, j), p);
    }
  LiftOptions opt;
  opt.substeps = X.substeps();
  opt.jobs = jobs;
  opt.alpha = X.alpha();
  return lift(spec, X.truncation(), X.grid(), opt);
}

namespace {

ScalarExtensionPath pairing_path(RoughPathPtr X, std::string name, const Series<Exact>& s) {
  Eigen::VectorXd v = X->basis().dense(s);
  return ScalarExtensionPath{std::move(name), [X, v](std::size_t a, std::size_t b) {
                               return X->character(a, b).dot(v);
                             }};
}

void require_extension(const RoughPath& X, int i, int j, const char* what) {
  if (!X.basis().has_letter(Letter::bracket(i, j)))
    throw std::invalid_argument(std::string(what) + ": rough path lacks bracket letter (" +
                                std::to_string(i) + std::to_string(j) + ")");
}

}  // namespace

ScalarExtensionPath bracket_path(RoughPathPtr Xhat, int i, int j) {
  require_extension(*Xhat, i, j, "bracket_path");
  return pairing_path(Xhat, "Xhat(" + std::to_string(i) + std::to_string(j) + ")",
                      Series<Exact>(dots({Letter::bracket(i, j)})));
}

ScalarExtensionPath tilde_path(RoughPathPtr Xhat, int i, int j, int k) {
  if (Xhat->truncation() != 3) throw std::invalid_argument("tilde_path: needs N = 3");
  require_extension(*Xhat, i, j, "tilde_path");
  return pairing_path(Xhat,
                      "Xtilde(" + std::to_string(i) + std::to_string(j) + std::to_string(k) + ")",
                      tilde_element(i, j, k));
}

ScalarExtensionPath cbar_path(RoughPathPtr Xhat, int i, int j, int k) {
  if (Xhat->truncation() != 3) throw std::invalid_argument("cbar_path: needs N = 3");
  require_extension(*Xhat, i, j, "cbar_path");
  require_extension(*Xhat, j, i, "cbar_path");
  return pairing_path(Xhat,
                      "Xcbar(" + std::to_string(i) + std::to_string(j) + std::to_string(k) + ")",
                      cbar_element(i, j, k));
}

}  // namespace pbrp
