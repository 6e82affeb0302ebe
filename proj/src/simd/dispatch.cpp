#include "kernels_internal.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bmland::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(BMLAND_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(BMLAND_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* table = [] {
    const char* forced = std::getenv("BMLAND_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return &scalar_kernels();
    if (const auto* t = avx2_kernels()) return t;
    if (const auto* t = neon_kernels()) return t;
    return &scalar_kernels();
  }();
  return *table;
}

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  check(a.size() == b.size(), "simd::dot: length mismatch");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check(x.size() == y.size(), "simd::axpy: length mismatch");
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  check(a.size() == rows * cols && x.size() == cols && y.size() == rows,
        "simd::gemv: shape mismatch");
  active_kernels().gemv(a.data(), rows, cols, x.data(), y.data());
}

void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  check(a.size() == rows * cols && x.size() == rows && y.size() == cols,
        "simd::gemv_t: shape mismatch");
  active_kernels().gemv_t(a.data(), rows, cols, x.data(), y.data());
}

}  // namespace bmland::simd
