#pragma once

#include <json.hpp>

#include "permorb/core.hpp"
#include "permorb/embeddings.hpp"
#include "permorb/rng.hpp"

namespace permorb {

/// Two clouds on different orbits, with a JSON description of how they
/// were built. The constructor re-checks dist(X, Y) > 0 via orbit_distance.
struct CounterexamplePair {
  CounterexamplePair(PointCloud x, PointCloud y, nlohmann::json certificate);

  PointCloud x;
  PointCloud y;
  nlohmann::json certificate;
};

/// d x D matrix with i.i.d. standard normal entries, drawn column by column.
DirectionSet gaussian_directions(std::size_t d, std::size_t D, RngSeed seed);

/// D independent uniform directions on the unit sphere in R^d.
DirectionSet sphere_directions(std::size_t d, std::size_t D, RngSeed seed);

/// 2 x D matrix with columns (cos(2 pi k / D), sin(2 pi k / D)), k = 1..D.
DirectionSet circle_directions(std::size_t D);

/// (I_d | tail).
DirectionSet identity_augmented(const Matrix& tail);

struct MatousekOptions {
  /// Upper limit on the number of rows n = 2^(k-1) of the generated clouds.
  std::size_t max_rows = 1u << 12;
  std::size_t max_attempts = 100;
  /// Coefficients are resampled until every odd-subset sum has norm at least
  /// this fraction of the largest subset sum (and above 1e-9 absolutely).
  double min_odd_norm_ratio = 0.05;
};

/// Pair X, Y with beta(A, X) = beta(A, Y) but different orbits, for any
/// d x D matrix A with d >= 2 and ceil(D / (d - 1)) small enough that
/// 2^(k-1) <= options.max_rows. Columns are split into consecutive blocks of
/// at most d - 1; each block gets a unit vector orthogonal to all its columns.
/// X holds the even-size subset sums of the scaled vectors, Y the odd ones.
CounterexamplePair matousek_counterexample(const DirectionSet& a, RngSeed seed,
                                           const MatousekOptions& options = {});

/// Number of rows produced by matousek_counterexample for (d, D).
std::size_t matousek_rows(std::size_t d, std::size_t D);

/// x_i = (0, ..., 0, cos(2 pi i / n), sin(2 pi i / n)) for i = 1..n, and Y
/// equal to X except that its first row is zero. dist(X, Y) = 1.
CounterexamplePair adversarial_circle_pair(std::size_t n, std::size_t d);

}  // namespace permorb
