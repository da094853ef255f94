// Compiled with -mavx2 only; selected at runtime after a CPU check.
#include <immintrin.h>

#include "robustiv/simd/grid_scan.hpp"

namespace robustiv::simd {

std::size_t scan_avx2(const ScanRows& rows, double lo, double step,
                      std::span<unsigned char> accepted) {
  const std::size_t s = rows.size();
  const std::size_t count = accepted.size();
  const std::size_t vec_end = count / 4 * 4;
  const __m256d v_lo = _mm256_set1_pd(lo);
  const __m256d v_step = _mm256_set1_pd(step);
  const __m256i v_half_limit = _mm256_set1_epi64x(static_cast<long long>(s));
  std::size_t total = 0;

  for (std::size_t i = 0; i < vec_end; i += 4) {
    const double base = double(i);
    const __m256d idx = _mm256_set_pd(base + 3.0, base + 2.0, base + 1.0, base);
    const __m256d beta = _mm256_add_pd(v_lo, _mm256_mul_pd(v_step, idx));
    const __m256d two_beta = _mm256_add_pd(beta, beta);
    const __m256d beta_sq = _mm256_mul_pd(beta, beta);
    __m256i violations = _mm256_setzero_si256();

    for (std::size_t j = 0; j < s; ++j) {
      const __m256d a = _mm256_set1_pd(rows.a[j]);
      const __m256d b = _mm256_set1_pd(rows.b[j]);
      const __m256d r = _mm256_sub_pd(a, _mm256_mul_pd(beta, b));
      const __m256d var = _mm256_add_pd(
          _mm256_sub_pd(_mm256_set1_pd(rows.va[j]), _mm256_mul_pd(two_beta, _mm256_set1_pd(rows.cab[j]))),
          _mm256_mul_pd(beta_sq, _mm256_set1_pd(rows.vb[j])));
      const __m256d lhs = _mm256_mul_pd(r, r);
      const __m256d rhs = _mm256_mul_pd(_mm256_set1_pd(rows.threshold2[j]), var);
      const __m256d hit = _mm256_cmp_pd(lhs, rhs, _CMP_GE_OQ);
      // Mask lanes are all ones (-1 as int64) where violated.
      violations = _mm256_sub_epi64(violations, _mm256_castpd_si256(hit));
    }
    // accepted when 2 * violations < s
    const __m256i twice = _mm256_add_epi64(violations, violations);
    const __m256i ok = _mm256_cmpgt_epi64(v_half_limit, twice);
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(ok));
    for (int k = 0; k < 4; ++k) {
      const unsigned char flag = (mask >> k) & 1;
      accepted[i + static_cast<std::size_t>(k)] = flag;
      total += flag;
    }
  }
  if (vec_end < count) {
    // Remaining points, same arithmetic as the reference kernel.
    for (std::size_t i = vec_end; i < count; ++i) {
      const double beta = lo + step * double(i);
      const double two_beta = beta + beta;
      const double beta_sq = beta * beta;
      std::size_t v = 0;
      for (std::size_t j = 0; j < s; ++j) {
        const double r = rows.a[j] - beta * rows.b[j];
        const double var = rows.va[j] - two_beta * rows.cab[j] + beta_sq * rows.vb[j];
        v += (r * r >= rows.threshold2[j] * var) ? 1 : 0;
      }
      const bool ok = 2 * v < s;
      accepted[i] = ok ? 1 : 0;
      total += ok ? 1 : 0;
    }
  }
  return total;
}

}  // namespace robustiv::simd
