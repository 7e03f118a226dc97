#include "pcii/eigen.hpp"

#include <algorithm>
#include <limits>

#include "pcii/error.hpp"

namespace pcii {

PerronResult perron_root(const PcMatrix& a, const PerronOptions& options) {
  if (!(options.tolerance > 0.0)) {
    throw Error(ErrorCode::EigenvalueNonconvergence, "tolerance must be positive");
  }
  const std::size_t n = a.order();
  std::vector<double> v(n, 1.0);
  std::vector<double> y(n);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
      y[i] = s;
      lo = std::min(lo, s / v[i]);
      hi = std::max(hi, s / v[i]);
      norm = std::max(norm, s);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / norm;
    if (hi - lo <= options.tolerance) {
      return {0.5 * (lo + hi), std::move(v), it, hi - lo};
    }
  }
  throw Error(ErrorCode::EigenvalueNonconvergence,
              "power iteration did not converge in " +
                  std::to_string(options.max_iterations) + " iterations");
}

double principal_eigenvalue(const PcMatrix& a, double tolerance,
                            std::size_t max_iterations) {
  return perron_root(a, {tolerance, max_iterations}).eigenvalue;
}

}  // namespace pcii
