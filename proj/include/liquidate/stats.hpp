#pragma once

#include <vector>

namespace liq {

double median(std::vector<double> v);
double mean(const std::vector<double>& v);

/// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log y against log x; all entries must be positive.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace liq
