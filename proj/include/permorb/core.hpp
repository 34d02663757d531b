#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "permorb/error.hpp"

namespace permorb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default budget for exhaustive subset/tuple enumerations.
inline constexpr std::uint64_t kDefaultBudget = 2'000'000;

/// Default relative rank tolerance for full-spark tests.
inline constexpr double kDefaultSparkTol = 1e-9;

/// Throws InvalidInput unless `m` is non-empty and every entry is finite.
void require_valid(const Matrix& m, std::string_view what);

/// An n x d real matrix whose rows are the points of the cloud.
class PointCloud {
 public:
  explicit PointCloud(Matrix data);

  static PointCloud zeros(std::size_t n, std::size_t d);

  const Matrix& data() const { return data_; }
  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(data_.cols()); }

  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }

  PointCloud scaled(double t) const;

 private:
  Matrix data_;
};

/// A bijection on {0, ..., n-1}, stored as the image of each index.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  std::size_t operator[](std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& map() const { return map_; }

  Permutation inverse() const;
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// All n! permutations of size n in lexicographic order. The position of a
/// permutation in this list is its factorial-number-system rank.
std::vector<Permutation> all_permutations(std::size_t n);

/// n! as an unsigned 64-bit value; throws InvalidInput on overflow.
std::uint64_t factorial(std::size_t n);

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Calls `visit` with each k-subset of {0, ..., n-1} in lexicographic
/// order. Stops early if `visit` returns false.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& visit);

/// Non-decreasing copy of `v`. Throws InvalidInput on non-finite entries.
Vector sort_ascending(const Vector& v);

/// Row i of the result is row sigma(i) of x.
PointCloud permute_rows(const PointCloud& x, const Permutation& sigma);

/// Singular values in non-increasing order, length min(rows, cols).
Vector singular_values(const Matrix& a);

/// True iff every d-column subset of the d x D matrix has smallest singular
/// value above tol times its largest. Requires C(D, d) subset evaluations.
bool is_full_spark(const Matrix& a, double tol = kDefaultSparkTol,
                   std::uint64_t budget = kDefaultBudget);

/// Columns of `a` indexed by `columns`, in the given order.
Matrix select_columns(const Matrix& a, std::span<const std::size_t> columns);

/// Column-major flattening: entry (i, k) lands at index k * n + i.
Vector flatten_embedding(const Matrix& e);

}  // namespace permorb
