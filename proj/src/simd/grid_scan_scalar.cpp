#include "robustiv/simd/grid_scan.hpp"

namespace robustiv::simd {

// Reference kernel. The vector kernels reproduce this arithmetic operation
// for operation, so their masks must match exactly.
std::size_t scan_scalar(const ScanRows& rows, double lo, double step,
                        std::span<unsigned char> accepted) {
  const std::size_t s = rows.size();
  std::size_t total = 0;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    const double beta = lo + step * double(i);
    const double two_beta = beta + beta;
    const double beta_sq = beta * beta;
    std::size_t violations = 0;
    for (std::size_t j = 0; j < s; ++j) {
      const double r = rows.a[j] - beta * rows.b[j];
      const double var = rows.va[j] - two_beta * rows.cab[j] + beta_sq * rows.vb[j];
      violations += (r * r >= rows.threshold2[j] * var) ? 1 : 0;
    }
    const bool ok = 2 * violations < s;
    accepted[i] = ok ? 1 : 0;
    total += ok ? 1 : 0;
  }
  return total;
}

}  // namespace robustiv::simd
