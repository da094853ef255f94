#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace robustiv::simd {

/// Per-instrument inputs to the majority-rule scan. For IV j and candidate
/// beta the residual is a_j - beta b_j and its variance is
/// va_j - 2 beta cab_j + beta^2 vb_j. The IV counts as a violation when
/// residual^2 >= threshold2_j * variance, i.e. |residual| >= t_j * SE.
struct ScanRows {
  std::span<const double> a;
  std::span<const double> b;
  std::span<const double> va;
  std::span<const double> cab;
  std::span<const double> vb;
  std::span<const double> threshold2;

  std::size_t size() const { return a.size(); }
};

/// Writes accepted[i] = 1 when fewer than half of the IVs are violations at
/// beta = lo + step * i, for i < accepted.size(). Returns the number of
/// accepted points.
using ScanFn = std::size_t (*)(const ScanRows& rows, double lo, double step,
                               std::span<unsigned char> accepted);

std::size_t scan_scalar(const ScanRows& rows, double lo, double step,
                        std::span<unsigned char> accepted);
#if defined(ROBUSTIV_HAVE_AVX2)
std::size_t scan_avx2(const ScanRows& rows, double lo, double step,
                      std::span<unsigned char> accepted);
#endif

enum class Backend { Scalar, Avx2 };

/// Backend picked at first use: AVX2 when compiled in and supported by the
/// CPU, unless ROBUSTIV_SIMD=scalar is set.
Backend active_backend();
/// Forces a backend; returns false (and changes nothing) if unavailable.
bool set_backend(Backend b);
bool backend_available(Backend b);
std::string_view backend_name(Backend b);

std::size_t scan(const ScanRows& rows, double lo, double step, std::span<unsigned char> accepted);

}  // namespace robustiv::simd
