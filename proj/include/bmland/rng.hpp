#pragma once

#include "bmland/types.hpp"

#include <cstdint>
#include <random>

namespace bmland {

using Rng = std::mt19937_64;

/// Counter-based seed splitting: stream `index` of `root` is a pure function of
/// (root, index), so any trial can be replayed on its own.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index);

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double stddev = 1.0);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(Index n, Rng& rng);

/// n x k matrix with orthonormal columns, k <= n.
Matrix random_orthonormal_columns(Index n, Index k, Rng& rng);

/// Uniform sample from the Frobenius ball of the given radius, shaped rows x cols.
Matrix uniform_ball(Index rows, Index cols, double radius, Rng& rng);

}  // namespace bmland
