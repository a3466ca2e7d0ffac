#include "pbrp/calculus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pbrp/stats.hpp"

namespace pbrp {

namespace {

void check_partition(std::size_t s, std::size_t t, std::size_t stride, std::size_t cells) {
  if (stride == 0) throw std::invalid_argument("integral: zero stride");
  if (s > t || t > cells) throw std::invalid_argument("integral: bad interval");
  if (s % stride != 0 || t % stride != 0)
    throw std::invalid_argument("integral: interval end points not on the mesh");
}

}  // namespace

Eigen::VectorXd rough_integral(const ControlledPath& Y, const RoughPath& X, Letter a,
                               std::size_t s, std::size_t t, std::size_t stride) {
  check_partition(s, t, stride, X.cells());
  if (stride % Y.stride() != 0) throw std::invalid_argument("integral: mesh not nested in Y's nodes");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(Y.dim());
  for (std::size_t u = s; u < t; u += stride) acc += integral_germ(Y, X, a, u, u + stride);
  return acc;
}

ConvergenceReport rough_integral_report(const ControlledPath& Y, const RoughPath& X, Letter a,
                                        std::size_t s, std::size_t t,
                                        const std::vector<std::size_t>& strides, double threshold) {
  if (strides.size() < 4) throw std::invalid_argument("integral report: need >= 4 meshes");
  ConvergenceReport rep;
  rep.threshold = threshold;
  for (std::size_t k = 0; k < strides.size(); ++k) {
    if (k > 0 && strides[k] >= strides[k - 1])
      throw std::invalid_argument("integral report: meshes must decrease");
    rep.meshes.push_back(X.grid()[strides[k]] - X.grid()[0]);
    rep.values.push_back(rough_integral(Y, X, a, s, t, strides[k]));
    rep.residuals.push_back(k == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : (rep.values[k] - rep.values[k - 1]).lpNorm<Eigen::Infinity>());
  }
  std::vector<double> h(rep.meshes.begin() + 1, rep.meshes.end());
  std::vector<double> r(rep.residuals.begin() + 1, rep.residuals.end());
  rep.slope = loglog_slope(h, r, 1e-13);
  rep.pass = rep.slope >= threshold;
  return rep;
}

double integral_defect_slope(const ControlledPath& Y, const RoughPath& X, Letter a,
                             const std::vector<int>& levels, double floor) {
  if (levels.size() < 4) throw std::invalid_argument("defect slope: need >= 4 scales");
  std::vector<double> h, m;
  for (int L : levels) {
    if (L < 1) throw std::invalid_argument("defect slope: scales start at 1");
    const std::size_t len = std::size_t(1) << L;
    if (len >= Y.count()) throw std::out_of_range("defect slope: scale outside grid");
    double best = 0.0;
    for (std::size_t b = 0; b + len < Y.count(); b += len) {
      const std::size_t s = Y.xnode(b), u = Y.xnode(b + len / 2), t = Y.xnode(b + len);
      Eigen::VectorXd d = integral_germ(Y, X, a, s, t) - integral_germ(Y, X, a, s, u) -
                          integral_germ(Y, X, a, u, t);
      best = std::max(best, d.lpNorm<Eigen::Infinity>());
    }
    h.push_back(X.grid()[Y.xnode(len)] - X.grid()[0]);
    m.push_back(best);
  }
  return loglog_slope(h, m, floor);
}

Eigen::VectorXd young_integral(const NodeFunction& g, const ScalarExtensionPath& h,
                               std::size_t s, std::size_t t, std::size_t stride) {
  if (stride == 0 || s > t || (t - s) % stride != 0)
    throw std::invalid_argument("young integral: bad partition");
  Eigen::VectorXd acc;
  for (std::size_t u = s; u < t; u += stride) {
    Eigen::VectorXd term = g(u) * h(u, u + stride);
    if (acc.size() == 0)
      acc = term;
    else
      acc += term;
  }
  if (acc.size() == 0) acc = Eigen::VectorXd::Zero(g(s).size());
  return acc;
}

double empirical_exponent(const std::function<double(std::size_t, std::size_t)>& incr,
                          const std::vector<double>& grid, std::size_t s, std::size_t t,
                          std::size_t stride, int levels) {
  std::vector<double> h, m;
  for (int L = 0; L < levels; ++L) {
    const std::size_t len = stride << L;
    if (s + len > t) break;
    double best = 0.0;
    for (std::size_t a = s; a + len <= t; a += len) best = std::max(best, std::abs(incr(a, a + len)));
    h.push_back(grid[len] - grid[0]);
    m.push_back(best);
  }
  return loglog_slope(h, m, 1e-300);
}

std::vector<std::string> young_precondition(const NodeFunction& g, const ScalarExtensionPath& h,
                                            const std::vector<double>& grid, std::size_t s,
                                            std::size_t t, std::size_t stride) {
  auto gi = [&](std::size_t a, std::size_t b) { return (g(b) - g(a)).lpNorm<Eigen::Infinity>(); };
  const double eg = empirical_exponent(gi, grid, s, t, stride);
  const double eh = empirical_exponent(h.increment, grid, s, t, stride);
  std::vector<std::string> out;
  if (!(eg + eh > 1.0)) {
    std::ostringstream os;
    os << "young integral against " << h.name << ": exponents " << eg << " + " << eh
       << " do not exceed 1";
    out.push_back(os.str());
  }
  return out;
}

SmoothFunction f_tau(const VectorFieldFamily& f, const Tree& tau) {
  const Letter a = tau.root();
  if (a.is_bracket() || a.i > f.letters())
    throw std::invalid_argument("f_tau: tree decorated outside the base letters: " + tau.key());
  const SmoothFunction& fi = f.fields[a.i - 1];
  if (tau.children().empty()) return fi;
  if (tau.children().size() > 3) throw std::invalid_argument("f_tau: more than three children");
  std::vector<SmoothFunction> kids;
  for (const auto& c : tau.children()) kids.push_back(f_tau(f, c));
  return contract(fi, std::move(kids));
}

ControlledPath solve_rde(RoughPathPtr X, const VectorFieldFamily& f, const Eigen::VectorXd& xi,
                         const RdeOptions& opt) {
  const int N = X->truncation();
  if (N < 2) throw std::invalid_argument("solve_rde: needs N >= 2");
  if (f.letters() != X->dimension())
    throw std::invalid_argument("solve_rde: need one vector field per base letter");
  const int n = static_cast<int>(xi.size());
  for (const auto& fi : f.fields)
    if (fi.in_dim() != n || fi.out_dim() != n)
      throw std::invalid_argument("solve_rde: vector fields must map R^n to R^n");

  ControlledPath Y(X, n, opt.stride);
  struct Term {
    SmoothFunction fn;
    std::size_t word;                    // index in X's basis
    std::optional<std::size_t> forest;   // index among Y's forests, if |tau| <= N-1
  };
  std::vector<Term> terms;
  for (const auto& tau : enumerate_trees(base_letters(X->dimension()), N))
    terms.push_back({f_tau(f, tau), X->basis().index(Forest(tau)), Y.forest_index(Forest(tau))});

  Eigen::VectorXd y = xi;
  std::vector<Eigen::VectorXd> vals(terms.size());
  for (std::size_t k = 0; k < Y.count(); ++k) {
    for (std::size_t q = 0; q < terms.size(); ++q) vals[q] = terms[q].fn(y);
    Y.set(0, k, y);
    for (std::size_t q = 0; q < terms.size(); ++q)
      if (terms[q].forest) Y.set(*terms[q].forest, k, vals[q]);
    if (k + 1 == Y.count()) break;
    const Eigen::VectorXd g = X->character(Y.xnode(k), Y.xnode(k + 1));
    for (std::size_t q = 0; q < terms.size(); ++q) y += g(terms[q].word) * vals[q];
    if (!y.allFinite() || y.norm() > opt.bound) {
      std::ostringstream os;
      os << "solve_rde: |Y| exceeded " << opt.bound << " at t = " << X->grid()[Y.xnode(k + 1)];
      throw SolverDivergence(os.str());
    }
  }
  return Y;
}

}  // namespace pbrp
