#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pbrp/rough_path.hpp"
#include "pbrp/smooth.hpp"

namespace pbrp {

// Coefficient paths <tau, Y_t> in R^n for forests of degree <= N-1 over the
// base letters of X, sampled at every stride-th node of X's grid. Slot k sits
// at X node k * stride. All public indices are X node indices.
class ControlledPath {
 public:
  ControlledPath(RoughPathPtr X, int n, std::size_t stride);

  const RoughPath& rough_path() const { return *X_; }
  RoughPathPtr rough_path_ptr() const { return X_; }
  int truncation() const { return X_->truncation(); }
  int dim() const { return n_; }
  std::size_t stride() const { return stride_; }
  std::size_t count() const { return count_; }
  std::size_t xnode(std::size_t slot) const { return slot * stride_; }
  std::size_t slot(std::size_t xnode) const;  // throws unless xnode is sampled

  const std::vector<Forest>& forests() const { return forests_; }
  std::optional<std::size_t> forest_index(const Forest& f) const;

  // zero for forests of degree <= N-1 without a stored coefficient
  Eigen::VectorXd coeff(const Forest& tau, std::size_t xnode) const;
  Eigen::VectorXd coeff(std::size_t forest, std::size_t xnode) const {
    return coef_[forest].col(static_cast<Eigen::Index>(slot(xnode)));
  }
  Eigen::VectorXd value(std::size_t xnode) const { return coeff(std::size_t(0), xnode); }

  void set(std::size_t forest, std::size_t slot, const Eigen::VectorXd& v) {
    coef_[forest].col(static_cast<Eigen::Index>(slot)) = v;
  }
  const Eigen::MatrixXd& samples(std::size_t forest) const { return coef_[forest]; }

  // same coefficients read against another rough path on the same grid whose
  // alphabet contains the base letters, e.g. the bracket extension
  ControlledPath against(RoughPathPtr other) const;

  // R^tau_{s,t} = <tau, Y_t> - sum_sigma <sigma, Y_s> <X_{s,t} (x) tau, D sigma>
  Eigen::VectorXd remainder(const Forest& tau, std::size_t s, std::size_t t) const;

 private:
  struct Transport {
    std::size_t sigma;
    std::size_t word;  // index of the left leg in X's basis
    double c;
  };

  RoughPathPtr X_;
  int n_;
  std::size_t stride_, count_;
  std::vector<Forest> forests_;
  std::vector<Eigen::MatrixXd> coef_;
  std::vector<std::vector<Transport>> transport_;  // per tau
};

// Z = F(X): <1> = F(X_t), <e_i> = d_i F, and for N = 3 <e_i e_j> = d_i d_j F,
// <[e_j]_i> = 0. F acts on the base path of X.
ControlledPath compose_FX(RoughPathPtr X, const SmoothFunction& F, std::size_t stride = 1);

// Z = F(Y): <tau> = sum_m sum over splittings tau = tau_1...tau_m into
// consecutive nonempty blocks of D^mF(Y):(<tau_1,Y>, ..., <tau_m,Y>).
ControlledPath compose_FY(const ControlledPath& Y, const SmoothFunction& F);

// Local germ of the rough integral against letter a of X over [s,t]:
//   sum_tau <tau, Y_s> <X_{s,t}, [tau]_a>
// X may be any rough path on Y's grid whose alphabet holds a and Y's letters.
Eigen::VectorXd integral_germ(const ControlledPath& Y, const RoughPath& X, Letter a,
                              std::size_t s, std::size_t t);

// Z = int_0^. Y dX^a (left-point compensated sums on Y's nodes),
// <[tau]_a, Z> = <tau, Y> for |tau| <= N-2, zero elsewhere.
ControlledPath lift_integral(const ControlledPath& Y, Letter a);

// Log-log slope of max_k |R^tau over the k-th block of 2^L slots| against the
// block length, for the given levels. Remainders below floor count as zero;
// all-zero gives +infinity.
double remainder_rate(const ControlledPath& Y, const Forest& tau, const std::vector<int>& levels,
                      double floor = 1e-12);

}  // namespace pbrp
