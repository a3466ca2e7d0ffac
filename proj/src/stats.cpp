#include "pbrp/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pbrp {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

double loglog_slope(const std::vector<double>& scale, const std::vector<double>& value,
                    double floor) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < scale.size() && k < value.size(); ++k) {
    if (!(value[k] > floor) || !std::isfinite(value[k])) continue;
    lx.push_back(std::log(scale[k]));
    ly.push_back(std::log(value[k]));
  }
  if (lx.size() < 2) return kInfiniteSlope;
  return fit_slope(lx, ly);
}

}  // namespace pbrp
