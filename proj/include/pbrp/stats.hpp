#pragma once

#include <limits>
#include <vector>

namespace pbrp {

constexpr double kInfiniteSlope = std::numeric_limits<double>::infinity();

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log(value) against log(scale), using only entries above floor.
// Fewer than two usable points yields the +infinity sentinel (the quantity is
// at roundoff level everywhere, or identically zero).
double loglog_slope(const std::vector<double>& scale, const std::vector<double>& value,
                    double floor);

}  // namespace pbrp
