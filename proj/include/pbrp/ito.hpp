#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pbrp/calculus.hpp"

namespace pbrp {

struct ItoOptions {
  double alpha = 0.45;
  std::vector<std::size_t> strides;  // coarse to fine, X node units, >= 4 rungs
  std::size_t s = 0;
  std::size_t t = 0;  // 0 means the last node
  double tolerance = 1e-5;
  double slack = 0.3;
  double floor = 1e-11;  // residuals below this are roundoff
  int jobs = 1;
};

struct ItoTerm {
  std::string name;
  std::vector<Eigen::VectorXd> values;  // per mesh
};

struct ItoReport {
  std::string theorem;  // simple-N2 | simple-N3 | general-N2 | general-N3
  double alpha = 0.0;
  double s = 0.0, t = 0.0;
  std::vector<double> meshes;
  std::vector<Eigen::VectorXd> lhs;
  std::vector<ItoTerm> terms;
  std::vector<double> residuals;
  double order = 0.0;
  double threshold = 0.0;  // 3 alpha - 1 or 4 alpha - 1, before slack
  double slack = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  std::vector<std::string> warnings;
};

// Residual order threshold at truncation N.
double ito_threshold(int N, double alpha);

// delta F(X) = int DF(X):dX + int D^2F(X):dXhat [+ int D^3F(X):dXtilde]
ItoReport verify_simple_N2(RoughPathPtr X, const SmoothFunction& F, const ItoOptions& opt,
                           RoughPathPtr Xhat = nullptr);
ItoReport verify_simple_N3(RoughPathPtr X, const SmoothFunction& F, const ItoOptions& opt,
                           RoughPathPtr Xhat = nullptr);

// Y solves dY = f(Y) dX from xi, one solve per mesh;
// delta F(Y) = int DF(Y):(f(Y) dX) + int D^2F(Y):((f,f) dXhat)
//              [+ int D^3F(Y):((f,f,f) dXtilde) + int D^2F(Y):((f, Df:f) dcbarX)]
ItoReport verify_general_N2(RoughPathPtr X, const VectorFieldFamily& f, const SmoothFunction& F,
                            const Eigen::VectorXd& xi, const ItoOptions& opt,
                            RoughPathPtr Xhat = nullptr);
ItoReport verify_general_N3(RoughPathPtr X, const VectorFieldFamily& f, const SmoothFunction& F,
                            const Eigen::VectorXd& xi, const ItoOptions& opt,
                            RoughPathPtr Xhat = nullptr);

}  // namespace pbrp
