#pragma once

#include <cstddef>
#include <vector>

#include "pcii/pc_matrix.hpp"

namespace pcii {

struct PerronOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

struct PerronResult {
  double eigenvalue = 0.0;
  /// Max-norm normalised (largest component is 1).
  std::vector<double> eigenvector;
  std::size_t iterations = 0;
  /// Width of the final Collatz-Wielandt bracket min_i (Av)_i/v_i <= lambda
  /// <= max_i (Av)_i/v_i; the returned eigenvalue is its midpoint.
  double bracket_width = 0.0;
};

/// Perron root of a strictly positive matrix by power iteration from the
/// all-ones vector with max-norm normalisation. Iteration stops once the
/// Collatz-Wielandt bracket is no wider than `tolerance`, which bounds the
/// error of the returned value by tolerance / 2. Throws
/// EigenvalueNonconvergence after max_iterations.
PerronResult perron_root(const PcMatrix& a, const PerronOptions& options = {});

double principal_eigenvalue(const PcMatrix& a, double tolerance = 1e-10,
                            std::size_t max_iterations = 100000);

}  // namespace pcii
