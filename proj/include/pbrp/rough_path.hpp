#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbrp/basis.hpp"
#include "pbrp/scalar_path.hpp"

namespace pbrp {

// Drivers of the character ODE  g' = g * (sum_a e_a dX^a/dt + sum_tau tau dlambda_tau/dt).
struct DriverSpec {
  std::vector<ScalarPath> letters;                        // X^1..X^d
  std::vector<std::pair<Tree, ScalarPath>> intensities;   // lambda_tau, tau of degree 2..N
  std::vector<std::pair<Letter, ScalarPath>> extra;       // drivers of bracket letters
};

struct LiftOptions {
  int substeps = 64;
  int jobs = 1;
  double alpha = 0.45;  // nominal regularity, diagnostics only
};

class RoughPath;
using RoughPathPtr = std::shared_ptr<const RoughPath>;

// Truncated characters X_{s,t} on a time grid. Step characters are composed
// through a cache of aligned power-of-two blocks, so X_{s,t} for any pair of
// grid nodes costs O(log M) products.
class RoughPath {
 public:
  RoughPath(std::shared_ptr<const Basis> basis, std::vector<double> grid,
            std::vector<Eigen::VectorXd> steps, Eigen::VectorXd x0, double alpha);

  const Basis& basis() const { return *basis_; }
  std::shared_ptr<const Basis> basis_ptr() const { return basis_; }
  int truncation() const { return basis_->truncation(); }
  int dimension() const { return d_; }  // number of base letters
  double alpha() const { return alpha_; }
  const std::vector<double>& grid() const { return grid_; }
  std::size_t cells() const { return grid_.size() - 1; }
  const std::vector<Eigen::VectorXd>& steps() const { return levels_.front(); }
  // aligned block [k 2^level, (k+1) 2^level) of step cells
  const Eigen::VectorXd& block(int level, std::size_t k) const { return levels_.at(level).at(k); }
  int levels() const { return static_cast<int>(levels_.size()); }

  // grid index of time t (must be a node up to 1e-12 relative)
  std::size_t node(double t) const;

  Eigen::VectorXd character(std::size_t a, std::size_t b) const;
  double eval(std::size_t a, std::size_t b, const Forest& w) const;
  double eval(double s, double t, const Forest& w) const;

  // base path X_{t_k}, letters in basis order (base letters first)
  Eigen::VectorXd base_path(std::size_t k) const;
  const Eigen::VectorXd& x0() const { return x0_; }

  const std::optional<DriverSpec>& spec() const { return spec_; }
  int substeps() const { return substeps_; }

  void attach_spec(DriverSpec spec, int substeps) {
    spec_ = std::move(spec);
    substeps_ = substeps;
  }

 private:
  std::shared_ptr<const Basis> basis_;
  std::vector<double> grid_;
  std::vector<std::vector<Eigen::VectorXd>> levels_;
  Eigen::VectorXd x0_;
  Eigen::MatrixXd base_;  // letters x nodes, running sums of first-order increments
  double alpha_;
  int d_ = 0;
  std::optional<DriverSpec> spec_;
  int substeps_ = 0;
};

std::vector<double> uniform_grid(double T, std::size_t cells);

RoughPathPtr lift(const DriverSpec& spec, int N, const std::vector<double>& grid,
                  const LiftOptions& opt = {});

double chen_residual(const RoughPath& X, std::size_t s, std::size_t u, std::size_t t,
                     const Forest& w);
double character_residual(const RoughPath& X, std::size_t s, std::size_t t, const Forest& a,
                          const Forest& b);

// Log-log slope of max_k |<X_{block(L,k)}, w>| against the block length, for
// the given block levels. All-zero components give +infinity.
double holder_slope(const RoughPath& X, const Forest& w, const std::vector<int>& levels);

// Re-lift over A plus the bracket letters (ij); the driver of (ij) is
// -lambda_{[j]_i}, so that <Xhat, (ij)> = <X, j i - [j]_i>.
RoughPathPtr bracket_extension(const RoughPath& X, int jobs = 1);

// Scalar path known through its increments between grid nodes.
struct ScalarExtensionPath {
  std::string name;
  std::function<double(std::size_t, std::size_t)> increment;
  double operator()(std::size_t a, std::size_t b) const { return increment(a, b); }
};

ScalarExtensionPath bracket_path(RoughPathPtr Xhat, int i, int j);
ScalarExtensionPath tilde_path(RoughPathPtr Xhat, int i, int j, int k);
ScalarExtensionPath cbar_path(RoughPathPtr Xhat, int i, int j, int k);

}  // namespace pbrp
