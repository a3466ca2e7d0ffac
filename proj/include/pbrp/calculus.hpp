#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbrp/controlled.hpp"

namespace pbrp {

struct VectorFieldFamily {
  std::vector<SmoothFunction> fields;  // f_1..f_d : R^n -> R^n
  int dim() const { return fields.empty() ? 0 : fields.front().in_dim(); }
  int letters() const { return static_cast<int>(fields.size()); }
};

struct ConvergenceReport {
  std::vector<double> meshes;            // strictly decreasing
  std::vector<Eigen::VectorXd> values;   // one per mesh
  std::vector<double> residuals;         // |value(h) - value(2h)|, first entry NaN
  double slope = 0.0;                    // fitted order of the residuals in h
  double threshold = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

class SolverDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compensated Riemann sum over [s,t] with step `stride` (X node indices):
//   sum_u sum_tau <tau, Y_u> <X_{u,u+stride}, [tau]_a>
Eigen::VectorXd rough_integral(const ControlledPath& Y, const RoughPath& X, Letter a,
                               std::size_t s, std::size_t t, std::size_t stride);

// Values over a ladder of strides (coarse to fine); residuals are successive
// differences, the slope is fitted in the mesh size and compared to threshold.
ConvergenceReport rough_integral_report(const ControlledPath& Y, const RoughPath& X, Letter a,
                                        std::size_t s, std::size_t t,
                                        const std::vector<std::size_t>& strides, double threshold);

// Log-log slope of max |germ(s,u,t) defect| over aligned dyadic blocks of
// Y's nodes, delta Xi_{s,u,t} = Xi_{s,t} - Xi_{s,u} - Xi_{u,t}.
double integral_defect_slope(const ControlledPath& Y, const RoughPath& X, Letter a,
                             const std::vector<int>& levels, double floor = 1e-13);

using NodeFunction = std::function<Eigen::VectorXd(std::size_t)>;

// Left-point sums  sum_u g(t_u) dh_{t_u, t_u+stride}.
Eigen::VectorXd young_integral(const NodeFunction& g, const ScalarExtensionPath& h,
                               std::size_t s, std::size_t t, std::size_t stride);

// Empirical Hoelder exponent of node-indexed increments over aligned blocks of
// 2^L strides; +infinity for a vanishing path.
double empirical_exponent(const std::function<double(std::size_t, std::size_t)>& incr,
                          const std::vector<double>& grid, std::size_t s, std::size_t t,
                          std::size_t stride, int levels = 4);

// Young integrability check: returns a warning when the exponents sum to <= 1.
std::vector<std::string> young_precondition(const NodeFunction& g, const ScalarExtensionPath& h,
                                            const std::vector<double>& grid, std::size_t s,
                                            std::size_t t, std::size_t stride);

// f_{e_i} = f_i,  f_{[tau_1...tau_m]_i} = D^m f_i : (f_{tau_1}, ..., f_{tau_m})
SmoothFunction f_tau(const VectorFieldFamily& f, const Tree& tau);

struct RdeOptions {
  std::size_t stride = 1;
  double bound = 1e6;
};

// Step-N Euler scheme Y_{k+1} = Y_k + sum_tau f_tau(Y_k) <X_{t_k,t_k+1}, tau>
// over trees 1 <= |tau| <= N. Coefficients of the result: Y at the unit,
// f_tau(Y) on trees, zero on forests with several trees.
ControlledPath solve_rde(RoughPathPtr X, const VectorFieldFamily& f, const Eigen::VectorXd& xi,
                         const RdeOptions& opt = {});

}  // namespace pbrp
