#include "permorb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace permorb {

namespace {

void check_same_shape(const PointCloud& x, const PointCloud& y) {
  if (x.n() != y.n() || x.d() != y.d()) {
    throw DimensionError("point clouds differ in shape: " + std::to_string(x.n()) + "x" + std::to_string(x.d()) +
                         " vs " + std::to_string(y.n()) + "x" + std::to_string(y.d()));
  }
}

Matrix squared_distances(const PointCloud& x, const PointCloud& y) {
  const auto n = static_cast<Eigen::Index>(x.n());
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = (x.data().row(i) - y.data().row(j)).squaredNorm();
  }
  return c;
}

// Sum of matched costs in row order; used for both solvers so that equal
// matchings produce identical distances.
double matched_cost(const Matrix& c, const std::vector<std::size_t>& column_of_row) {
  double s = 0.0;
  for (std::size_t i = 0; i < column_of_row.size(); ++i) {
    s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(column_of_row[i]));
  }
  return s;
}

}  // namespace

Assignment solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1) throw DimensionError("assignment: cost matrix must be square");
  require_valid(cost, "assignment cost");
  const auto n = static_cast<std::size_t>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based shortest augmenting path formulation; column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.column_of_row[row_of_col[j] - 1] = j - 1;
  out.cost = matched_cost(cost, out.column_of_row);
  return out;
}

OrbitDistanceResult orbit_distance(const PointCloud& x, const PointCloud& y) {
  check_same_shape(x, y);
  const Matrix c = squared_distances(x, y);
  Assignment a = solve_assignment(c);
  return {std::sqrt(std::max(0.0, a.cost)), Permutation(std::move(a.column_of_row))};
}

OrbitDistanceResult orbit_distance_bruteforce(const PointCloud& x, const PointCloud& y) {
  check_same_shape(x, y);
  if (x.n() > kBruteForceMaxRows) {
    throw BudgetExceeded("brute-force orbit distance enumerates n! matchings; n = " + std::to_string(x.n()) +
                         " exceeds " + std::to_string(kBruteForceMaxRows));
  }
  const Matrix c = squared_distances(x, y);
  std::vector<std::size_t> perm(x.n());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    const double cost = matched_cost(c, perm);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {std::sqrt(std::max(0.0, best_cost)), Permutation(std::move(best))};
}

double wasserstein2(const PointCloud& x, const PointCloud& y) {
  return orbit_distance(x, y).distance / std::sqrt(static_cast<double>(x.n()));
}

double embedding_gap(const DirectionSet& a, const PointCloud& x, const PointCloud& y) {
  check_same_shape(x, y);
  return (beta(a, x).matrix() - beta(a, y).matrix()).norm();
}

SlicedW2 sliced_w2_sampled(const PointCloud& x, const PointCloud& y, const DirectionSet& theta) {
  SlicedW2 out;
  for (Eigen::Index k = 0; k < theta.matrix().cols(); ++k) {
    if (std::abs(theta.matrix().col(k).norm() - 1.0) > 1e-9) out.non_unit_directions = true;
  }
  const double nd = static_cast<double>(x.n() * theta.D());
  out.value = embedding_gap(theta, x, y) / std::sqrt(nd);
  return out;
}

}  // namespace permorb
