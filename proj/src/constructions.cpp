#include "permorb/constructions.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "permorb/io.hpp"
#include "permorb/metrics.hpp"

namespace permorb {

CounterexamplePair::CounterexamplePair(PointCloud x_, PointCloud y_, nlohmann::json certificate_)
    : x(std::move(x_)), y(std::move(y_)), certificate(std::move(certificate_)) {
  const double dist = orbit_distance(x, y).distance;
  if (!(dist > 0.0)) throw ConstructionImpossible("counterexample pair lies on a single orbit");
  certificate["dist"] = dist;
}

DirectionSet gaussian_directions(std::size_t d, std::size_t D, RngSeed seed) {
  if (d < 1 || D < 1) throw InvalidInput("gaussian_directions: d and D must be positive");
  Rng rng(seed);
  Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(D));
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, k) = rng.normal();
  }
  return DirectionSet(std::move(a));
}

DirectionSet sphere_directions(std::size_t d, std::size_t D, RngSeed seed) {
  if (d < 1 || D < 1) throw InvalidInput("sphere_directions: d and D must be positive");
  Rng rng(seed);
  Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(D));
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, k) = rng.normal();
      norm = a.col(k).norm();
    } while (norm < 1e-300);
    a.col(k) /= norm;
  }
  return DirectionSet(std::move(a));
}

DirectionSet circle_directions(std::size_t D) {
  if (D < 2) throw InvalidInput("circle_directions: D must be at least 2");
  Matrix a(2, static_cast<Eigen::Index>(D));
  for (std::size_t k = 1; k <= D; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(D);
    a(0, static_cast<Eigen::Index>(k - 1)) = std::cos(angle);
    a(1, static_cast<Eigen::Index>(k - 1)) = std::sin(angle);
  }
  return DirectionSet(std::move(a));
}

DirectionSet identity_augmented(const Matrix& tail) {
  require_valid(tail, "identity_augmented tail");
  const Eigen::Index d = tail.rows();
  Matrix a(d, d + tail.cols());
  a << Matrix::Identity(d, d), tail;
  return DirectionSet(std::move(a));
}

std::size_t matousek_rows(std::size_t d, std::size_t D) {
  if (d < 2) throw InvalidInput("matousek construction needs d >= 2");
  const std::size_t k = (D + d - 2) / (d - 1);
  if (k < 1 || k > 62) throw InvalidInput("matousek construction: block count out of range");
  return std::size_t{1} << (k - 1);
}

CounterexamplePair matousek_counterexample(const DirectionSet& a, RngSeed seed, const MatousekOptions& options) {
  const std::size_t d = a.d();
  const std::size_t D = a.D();
  const std::size_t n = matousek_rows(d, D);
  if (n > options.max_rows) {
    throw InvalidInput("matousek construction would need " + std::to_string(n) + " rows, above the limit " +
                       std::to_string(options.max_rows));
  }
  const std::size_t k = static_cast<std::size_t>(std::countr_zero(n)) + 1;

  // Consecutive blocks of at most d-1 columns, each with a unit null vector.
  std::vector<std::vector<std::size_t>> blocks(k);
  for (std::size_t c = 0; c < D; ++c) blocks[c / (d - 1)].push_back(c);
  Matrix v(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::VectorXd null_vec;
    if (blocks[j].empty()) {
      null_vec = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(d), 0);
    } else {
      const Matrix block_t = select_columns(a.matrix(), blocks[j]).transpose();
      Eigen::JacobiSVD<Matrix> svd(block_t, Eigen::ComputeFullV);
      const Eigen::Index rank_limit = static_cast<Eigen::Index>(blocks[j].size());
      if (rank_limit >= static_cast<Eigen::Index>(d)) {
        throw ConstructionImpossible("block has column rank d; no orthogonal vector exists");
      }
      null_vec = svd.matrixV().col(static_cast<Eigen::Index>(d) - 1);
    }
    for (Eigen::Index i = 0; i < null_vec.size(); ++i) {
      if (std::abs(null_vec(i)) > 1e-12) {
        if (null_vec(i) < 0) null_vec = -null_vec;
        break;
      }
    }
    v.col(static_cast<Eigen::Index>(j)) = null_vec.normalized();
  }

  Rng rng(seed);
  const std::size_t subsets = std::size_t{1} << k;
  std::vector<double> alphas(k);
  Matrix sums(static_cast<Eigen::Index>(subsets), static_cast<Eigen::Index>(d));
  std::size_t attempt = 0;
  for (;; ++attempt) {
    if (attempt == options.max_attempts) {
      throw ConstructionImpossible("could not draw coefficients with non-vanishing odd subset sums in " +
                                   std::to_string(options.max_attempts) + " attempts");
    }
    for (auto& alpha : alphas) alpha = rng.uniform(0.5, 1.5);
    double max_norm = 0.0;
    double min_odd = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      Vector s = Vector::Zero(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < k; ++j) {
        if (mask >> j & 1u) s += alphas[j] * v.col(static_cast<Eigen::Index>(j));
      }
      sums.row(static_cast<Eigen::Index>(mask)) = s.transpose();
      max_norm = std::max(max_norm, s.norm());
      if (std::popcount(mask) % 2 == 1) min_odd = std::min(min_odd, s.norm());
    }
    if (min_odd > 1e-9 && min_odd >= options.min_odd_norm_ratio * max_norm) break;
  }

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Matrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Index xi = 0, yi = 0;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    if (std::popcount(mask) % 2 == 0) {
      x.row(xi++) = sums.row(static_cast<Eigen::Index>(mask));
    } else {
      y.row(yi++) = sums.row(static_cast<Eigen::Index>(mask));
    }
  }

  nlohmann::json cert;
  cert["construction"] = "matousek";
  cert["d"] = d;
  cert["D"] = D;
  cert["k"] = k;
  cert["n"] = n;
  cert["blocks"] = blocks;
  cert["alphas"] = alphas;
  cert["null_vectors"] = matrix_to_json(v.transpose());
  cert["attempts"] = attempt + 1;
  cert["seed"] = seed.value;
  return CounterexamplePair(PointCloud(std::move(x)), PointCloud(std::move(y)), std::move(cert));
}

CounterexamplePair adversarial_circle_pair(std::size_t n, std::size_t d) {
  if (n < 2 || d < 2) throw InvalidInput("adversarial_circle_pair needs n >= 2 and d >= 2");
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i <= n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    x(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(d - 2)) = std::cos(angle);
    x(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(d - 1)) = std::sin(angle);
  }
  Matrix y = x;
  y.row(0).setZero();
  nlohmann::json cert;
  cert["construction"] = "adversarial-circle";
  cert["n"] = n;
  cert["d"] = d;
  return CounterexamplePair(PointCloud(std::move(x)), PointCloud(std::move(y)), std::move(cert));
}

}  // namespace permorb
