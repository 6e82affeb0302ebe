#pragma once

// Dense double-precision kernels used on the objective hot paths (sensing
// measurements and the dense quadratic operator). Each instruction set has its
// own implementation table; the active one is chosen once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace bmland::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t len);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t len);
  /// y = A x for row-major A (rows x cols)
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  /// y = A^T x for row-major A (rows x cols); y has length cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Best available table. BMLAND_SIMD=scalar in the environment forces the
/// reference kernels. Selected on first call, stable afterwards.
const KernelTable& active_kernels();

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);
void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

}  // namespace bmland::simd
