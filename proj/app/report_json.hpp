#pragma once

#include "config.hpp"
#include "pbrp/calculus.hpp"
#include "pbrp/hopf.hpp"
#include "pbrp/ito.hpp"

namespace pbrp::app {

// Non-finite reals are written as the strings "inf", "-inf" and "nan".
Json real(double v);
Json reals(const std::vector<double>& v);
Json reals(const Eigen::VectorXd& v);

Json to_json(const ItoReport& r);
Json to_json(const ConvergenceReport& r);
Json to_json(const SelftestResult& r);

// mesh residual order, one row per mesh
std::string convergence_table(const std::vector<double>& meshes, const std::vector<double>& residuals,
                              double floor);

}  // namespace pbrp::app
