#include "pbrp/smooth.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbrp {

SmoothFunction::SmoothFunction(int in, int out, Map f, std::string name)
    : in_(in), out_(out), f_(std::move(f)), name_(std::move(name)) {
  if (in < 1 || out < 1) throw std::invalid_argument("smooth function: bad dimensions");
}

JetVec SmoothFunction::operator()(const JetVec& y) const {
  if (static_cast<int>(y.size()) != in_)
    throw std::invalid_argument("smooth function '" + name_ + "': input dimension mismatch");
  JetVec out = f_(y);
  if (static_cast<int>(out.size()) != out_)
    throw std::logic_error("smooth function '" + name_ + "': output dimension mismatch");
  return out;
}

Eigen::VectorXd SmoothFunction::operator()(const Eigen::VectorXd& y) const {
  return values((*this)(to_jets(y)));
}

JetVec SmoothFunction::derivative(const JetVec& u, const std::vector<JetVec>& v) const {
  const int m = static_cast<int>(v.size());
  if (m == 0) return (*this)(u);
  int n = 0;
  for (const auto& x : u) n = std::max(n, x.vars());
  for (const auto& w : v) {
    if (static_cast<int>(w.size()) != in_)
      throw std::invalid_argument("smooth function: direction dimension mismatch");
    for (const auto& x : w) n = std::max(n, x.vars());
  }
  if (n + m > Jet::kMaxVars) throw std::length_error("jet nesting too deep");

  JetVec shifted(in_);
  for (int c = 0; c < in_; ++c) {
    Jet x = u[c].widened(n + m);
    for (int p = 0; p < m; ++p) {
      const std::size_t bit = std::size_t(1) << (n + p);
      const Jet& w = v[p][c];
      for (std::size_t s = 0; s < w.width(); ++s) x.coeff(s | bit) += w[s];
    }
    shifted[c] = x;
  }
  const JetVec r = (*this)(shifted);
  std::size_t top = 0;
  for (int p = 0; p < m; ++p) top |= std::size_t(1) << (n + p);
  JetVec out(out_);
  for (int c = 0; c < out_; ++c) {
    Jet y = Jet::zeros(n);
    for (std::size_t s = 0; s < y.width(); ++s) y.coeff(s) = r[c][s | top];
    out[c] = y;
  }
  return out;
}

Eigen::VectorXd SmoothFunction::derivative(const Eigen::VectorXd& u,
                                           const std::vector<Eigen::VectorXd>& v) const {
  std::vector<JetVec> vj;
  for (const auto& w : v) vj.push_back(to_jets(w));
  return values(derivative(to_jets(u), vj));
}

double SmoothFunction::partial(const Eigen::VectorXd& u, const std::vector<int>& idx,
                               int component) const {
  std::vector<Eigen::VectorXd> dirs;
  for (int i : idx) dirs.push_back(Eigen::VectorXd::Unit(in_, i));
  return derivative(u, dirs)(component);
}

JetVec to_jets(const Eigen::VectorXd& v) {
  JetVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = Jet(v(k));
  return out;
}

Eigen::VectorXd values(const JetVec& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out(k) = v[k].value();
  return out;
}

SmoothFunction contract(const SmoothFunction& F, std::vector<SmoothFunction> G) {
  for (const auto& g : G)
    if (g.out_dim() != F.in_dim() || g.in_dim() != F.in_dim())
      throw std::invalid_argument("contract: dimension mismatch");
  std::string name = "D" + std::to_string(G.size()) + F.name();
  auto map = [F, G](const JetVec& y) {
    std::vector<JetVec> dirs;
    for (const auto& g : G) dirs.push_back(g(y));
    return F.derivative(y, dirs);
  };
  return SmoothFunction(F.in_dim(), F.out_dim(), map, name);
}

SmoothFunction partial_function(const SmoothFunction& F, std::vector<int> idx) {
  std::vector<SmoothFunction> G;
  for (int i : idx)
    G.push_back(builtin::constant(Eigen::VectorXd::Unit(F.in_dim(), i), F.in_dim()));
  return contract(F, G);
}

namespace builtin {

SmoothFunction constant(const Eigen::VectorXd& value, int in) {
  return SmoothFunction(in, static_cast<int>(value.size()),
                        [value](const JetVec&) { return to_jets(value); }, "const");
}

SmoothFunction identity(int n) {
  return SmoothFunction(n, n, [](const JetVec& y) { return y; }, "id");
}

SmoothFunction affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("affine: shape mismatch");
  return SmoothFunction(
      static_cast<int>(A.cols()), static_cast<int>(A.rows()),
      [A, b](const JetVec& y) {
        JetVec out(A.rows());
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
          Jet acc(b(r));
          for (Eigen::Index c = 0; c < A.cols(); ++c)
            if (A(r, c) != 0.0) acc += A(r, c) * y[c];
          out[r] = acc;
        }
        return out;
      },
      "affine");
}

SmoothFunction power_sum(int n, int p, double scale) {
  return SmoothFunction(
      n, 1,
      [p, scale](const JetVec& y) {
        Jet acc(0.0);
        for (const auto& x : y) acc += pow(x, p);
        return JetVec{acc * scale};
      },
      "power_sum");
}

SmoothFunction quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c) {
  return SmoothFunction(
      static_cast<int>(Q.cols()), 1,
      [Q, c](const JetVec& y) {
        Jet acc(0.0);
        for (Eigen::Index i = 0; i < Q.rows(); ++i) {
          acc += c(i) * y[i];
          for (Eigen::Index j = 0; j < Q.cols(); ++j)
            if (Q(i, j) != 0.0) acc += Q(i, j) * (y[i] * y[j]);
        }
        return JetVec{acc};
      },
      "quadratic");
}

SmoothFunction cubic(const Eigen::VectorXd& a, double mixed) {
  return SmoothFunction(
      static_cast<int>(a.size()), 1,
      [a, mixed](const JetVec& y) {
        Jet acc(0.0);
        for (Eigen::Index i = 0; i < a.size(); ++i) acc += (a(i) / 6.0) * pow(y[i], 3);
        if (mixed != 0.0) acc += mixed * (y.front() * y[y.size() > 1 ? 1 : 0] * y.back());
        return JetVec{acc};
      },
      "cubic");
}

namespace {

Jet dot(const Eigen::VectorXd& w, const JetVec& y) {
  Jet acc(0.0);
  for (Eigen::Index i = 0; i < w.size(); ++i) acc += w(i) * y[i];
  return acc;
}

}  // namespace

SmoothFunction sin_wave(const Eigen::VectorXd& w, double scale) {
  return SmoothFunction(
      static_cast<int>(w.size()), 1,
      [w, scale](const JetVec& y) { return JetVec{scale * sin(dot(w, y))}; }, "sin_wave");
}

SmoothFunction exp_wave(const Eigen::VectorXd& w, double scale) {
  return SmoothFunction(
      static_cast<int>(w.size()), 1,
      [w, scale](const JetVec& y) { return JetVec{scale * exp(dot(w, y))}; }, "exp_wave");
}

SmoothFunction sin_field(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return SmoothFunction(
      static_cast<int>(a.size()), static_cast<int>(a.size()),
      [a, b](const JetVec& y) {
        JetVec out(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) out[k] = a(k) * sin(y[k]) + Jet(b(k));
        return out;
      },
      "sin_field");
}

}  // namespace builtin

}  // namespace pbrp
