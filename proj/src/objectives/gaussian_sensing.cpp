#include "bmland/objectives.hpp"
#include "bmland/simd/kernels.hpp"

#include <cmath>
#include <span>

namespace bmland {

std::shared_ptr<const GaussianSensing> GaussianSensing::create(LiftedMatrix target,
                                                               Index measurements,
                                                               std::uint64_t seed) {
  if (measurements < 1) throw ContractError("GaussianSensing: need p >= 1");
  const Index n = target.dim();
  const Index nn = n * n;
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(measurements));
  std::vector<double> a(static_cast<std::size_t>(measurements * nn));
  Vector obs(measurements);
  for (Index i = 0; i < measurements; ++i) {
    const Matrix ai = scale * sym(gaussian_matrix(n, n, rng));
    std::copy(ai.data(), ai.data() + nn, a.begin() + i * nn);
    obs(i) = inner(ai, target.mat());
  }
  return std::shared_ptr<const GaussianSensing>(
      new GaussianSensing(std::move(target), measurements, std::move(a), std::move(obs)));
}

GaussianSensing::GaussianSensing(LiftedMatrix target, Index p, std::vector<double> a, Vector obs)
    : target_(std::move(target)), p_(p), a_(std::move(a)), obs_(std::move(obs)) {}

Matrix GaussianSensing::sensing_matrix(Index i) const {
  const Index n = dim();
  return Eigen::Map<const Matrix>(a_.data() + i * n * n, n, n);
}

// Each A_i is symmetric, so <A_i, X> = <A_i, sym X> for any X.
Vector GaussianSensing::measure(const Matrix& x) const {
  const auto nn = static_cast<std::size_t>(x.size());
  Vector out(p_);
  simd::gemv(a_, static_cast<std::size_t>(p_), nn, std::span<const double>(x.data(), nn),
             std::span<double>(out.data(), static_cast<std::size_t>(p_)));
  return out;
}

Matrix GaussianSensing::adjoint(const Vector& w) const {
  const Index n = dim();
  Matrix out(n, n);
  const auto nn = static_cast<std::size_t>(n * n);
  simd::gemv_t(a_, static_cast<std::size_t>(p_), nn,
               std::span<const double>(w.data(), static_cast<std::size_t>(p_)),
               std::span<double>(out.data(), nn));
  return out;
}

double GaussianSensing::value(const Matrix& x) const {
  check_square(x, "value");
  return 0.5 * (measure(x) - obs_).squaredNorm();
}

Matrix GaussianSensing::gradient(const Matrix& x) const {
  check_square(x, "gradient");
  return adjoint(measure(x) - obs_);
}

Matrix GaussianSensing::hess_apply(const Matrix& x, const Matrix& g) const {
  check_square(x, "hess_apply");
  check_square(g, "hess_apply");
  return adjoint(measure(g));
}

double GaussianSensing::hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const {
  check_square(x, "hess_bilinear");
  check_square(g, "hess_bilinear");
  check_square(h, "hess_bilinear");
  return measure(g).dot(measure(h));
}

}  // namespace bmland
