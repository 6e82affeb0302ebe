#include "bmland/rng.hpp"

#include <cmath>

namespace bmland {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  return derive_seed(derive_seed(root, stream), index);
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = dist(rng);
    }
  }
  return m;
}

Matrix random_orthonormal_columns(Index n, Index k, Rng& rng) {
  const Matrix g = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix random_orthogonal(Index n, Rng& rng) { return random_orthonormal_columns(n, n, rng); }

Matrix uniform_ball(Index rows, Index cols, double radius, Rng& rng) {
  Matrix dir = gaussian_matrix(rows, cols, rng);
  const double nrm = dir.norm();
  if (nrm == 0.0) return Matrix::Zero(rows, cols);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double dim = static_cast<double>(rows * cols);
  const double rad = radius * std::pow(unif(rng), 1.0 / dim);
  return dir * (rad / nrm);
}

}  // namespace bmland
