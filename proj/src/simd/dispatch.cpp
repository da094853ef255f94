#include <atomic>
#include <cstdlib>
#include <string>

#include "robustiv/simd/grid_scan.hpp"

namespace robustiv::simd {

namespace {

bool cpu_has_avx2() {
#if defined(ROBUSTIV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("ROBUSTIV_SIMD"); env && std::string(env) == "scalar")
    return Backend::Scalar;
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<int>& backend_slot() {
  static std::atomic<int> slot{static_cast<int>(detect())};
  return slot;
}

}  // namespace

bool backend_available(Backend b) {
  return b == Backend::Scalar || (b == Backend::Avx2 && cpu_has_avx2());
}

Backend active_backend() { return static_cast<Backend>(backend_slot().load()); }

bool set_backend(Backend b) {
  if (!backend_available(b)) return false;
  backend_slot().store(static_cast<int>(b));
  return true;
}

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

std::size_t scan(const ScanRows& rows, double lo, double step, std::span<unsigned char> accepted) {
#if defined(ROBUSTIV_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return scan_avx2(rows, lo, step, accepted);
#endif
  return scan_scalar(rows, lo, step, accepted);
}

}  // namespace robustiv::simd
