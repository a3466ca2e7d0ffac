#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "pbrp/jet.hpp"

namespace pbrp {

using JetVec = std::vector<Jet>;

// A map R^in -> R^out evaluated on jets, so every directional derivative is
// exact:  D^mF(u):(v_1,...,v_m)  is the coefficient of e_1...e_m in
// F(u + e_1 v_1 + ... + e_m v_m).
class SmoothFunction {
 public:
  using Map = std::function<JetVec(const JetVec&)>;

  SmoothFunction() = default;
  SmoothFunction(int in, int out, Map f, std::string name = {});

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const std::string& name() const { return name_; }
  explicit operator bool() const { return static_cast<bool>(f_); }

  JetVec operator()(const JetVec& y) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const;

  // D^mF(u):(v_1..v_m); m = v.size(), m = 0 gives F(u)
  JetVec derivative(const JetVec& u, const std::vector<JetVec>& v) const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& u,
                             const std::vector<Eigen::VectorXd>& v) const;
  // d^m F_component / dy_{idx[0]} ... dy_{idx[m-1]}, zero-based indices
  double partial(const Eigen::VectorXd& u, const std::vector<int>& idx, int component = 0) const;

 private:
  int in_ = 0, out_ = 0;
  Map f_;
  std::string name_;
};

// y -> D^mF(y):(G_1(y),...,G_m(y))
SmoothFunction contract(const SmoothFunction& F, std::vector<SmoothFunction> G);
// y -> d^m F / dy_{idx...}(y), zero-based
SmoothFunction partial_function(const SmoothFunction& F, std::vector<int> idx);

JetVec to_jets(const Eigen::VectorXd& v);
Eigen::VectorXd values(const JetVec& v);

namespace builtin {

SmoothFunction constant(const Eigen::VectorXd& value, int in);
SmoothFunction identity(int n);
// A y + b
SmoothFunction affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
// scale * sum_i y_i^p, scalar valued
SmoothFunction power_sum(int n, int p, double scale);
// y^T Q y + c^T y, scalar valued
SmoothFunction quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c);
// sum_i a_i y_i^3 / 6 + mixed * y_0 y_1 y_{n-1}
SmoothFunction cubic(const Eigen::VectorXd& a, double mixed);
// scale * sin(w . y)
SmoothFunction sin_wave(const Eigen::VectorXd& w, double scale);
// scale * exp(w . y)
SmoothFunction exp_wave(const Eigen::VectorXd& w, double scale);
// componentwise a_k sin(y_k) + b_k, R^n -> R^n
SmoothFunction sin_field(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace builtin

}  // namespace pbrp
