#pragma once

#include "permorb/core.hpp"
#include "permorb/embeddings.hpp"

namespace permorb {

/// Exact minimum-cost perfect matching on a square cost matrix.
struct Assignment {
  /// Row i is matched to column `column_of_row[i]`.
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;
};

/// Hungarian method with dual potentials, O(n^3). Costs must be finite.
Assignment solve_assignment(const Matrix& cost);

struct OrbitDistanceResult {
  double distance = 0.0;
  /// Optimal matching: row i of X pairs with row sigma(i) of Y.
  Permutation sigma = Permutation::identity(1);
};

/// min over sigma of ||X - sigma Y||_F, solved as a linear assignment on
/// squared Euclidean row distances.
OrbitDistanceResult orbit_distance(const PointCloud& x, const PointCloud& y);

/// Largest n accepted by orbit_distance_bruteforce.
inline constexpr std::size_t kBruteForceMaxRows = 9;

/// Enumerates all n! matchings. Throws BudgetExceeded for n > 9.
OrbitDistanceResult orbit_distance_bruteforce(const PointCloud& x, const PointCloud& y);

/// 2-Wasserstein distance between the uniform empirical measures on the rows.
double wasserstein2(const PointCloud& x, const PointCloud& y);

struct SlicedW2 {
  double value = 0.0;
  /// Set when some direction deviates from unit norm by more than 1e-9; the
  /// Monte-Carlo reading of the value assumes unit directions.
  bool non_unit_directions = false;
};

/// Sampled sliced 2-Wasserstein distance over the columns of theta.
SlicedW2 sliced_w2_sampled(const PointCloud& x, const PointCloud& y, const DirectionSet& theta);

/// ||beta(A, X) - beta(A, Y)||_F.
double embedding_gap(const DirectionSet& a, const PointCloud& x, const PointCloud& y);

}  // namespace permorb
