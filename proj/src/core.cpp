#include "permorb/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace permorb {

void require_valid(const Matrix& m, std::string_view what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput(std::string(what) + ": matrix must have at least one row and one column");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        throw InvalidInput(std::string(what) + ": non-finite entry at row " + std::to_string(i + 1) +
                           ", column " + std::to_string(j + 1));
      }
    }
  }
}

PointCloud::PointCloud(Matrix data) : data_(std::move(data)) { require_valid(data_, "point cloud"); }

PointCloud PointCloud::zeros(std::size_t n, std::size_t d) {
  return PointCloud(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)));
}

PointCloud PointCloud::scaled(double t) const { return PointCloud(data_ * t); }

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  if (map_.empty()) throw InvalidInput("permutation must be non-empty");
  std::vector<bool> seen(map_.size(), false);
  for (auto v : map_) {
    if (v >= map_.size() || seen[v]) throw InvalidInput("permutation map is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

std::vector<Permutation> all_permutations(std::size_t n) {
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  std::vector<Permutation> out;
  out.reserve(factorial(n));
  do {
    out.emplace_back(map);
  } while (std::next_permutation(map.begin(), map.end()));
  return out;
}

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (f > std::numeric_limits<std::uint64_t>::max() / i) throw InvalidInput("factorial overflows 64 bits");
    f *= i;
  }
  return f;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    if (!visit(idx)) return;
    // Advance to the next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Vector sort_ascending(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw InvalidInput("sort_ascending: non-finite entry at index " + std::to_string(i + 1));
    }
  }
  Vector out = v;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

PointCloud permute_rows(const PointCloud& x, const Permutation& sigma) {
  if (sigma.size() != x.n()) {
    throw DimensionError("permute_rows: permutation has length " + std::to_string(sigma.size()) +
                         " but the cloud has " + std::to_string(x.n()) + " rows");
  }
  Matrix out(x.data().rows(), x.data().cols());
  for (std::size_t i = 0; i < x.n(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(sigma[i]);
  }
  return PointCloud(std::move(out));
}

Vector singular_values(const Matrix& a) {
  require_valid(a, "singular_values");
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

Matrix select_columns(const Matrix& a, std::span<const std::size_t> columns) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = a.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

bool is_full_spark(const Matrix& a, double tol, std::uint64_t budget) {
  require_valid(a, "is_full_spark");
  if (!(tol > 0.0)) throw InvalidInput("is_full_spark: tolerance must be positive");
  const auto d = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  if (cols < d) throw InvalidInput("is_full_spark: matrix must be wide (D >= d)");
  const std::uint64_t count = binomial(cols, d);
  if (count > budget) {
    throw BudgetExceeded("is_full_spark: " + std::to_string(count) + " subsets exceed budget " +
                         std::to_string(budget));
  }
  bool spark = true;
  for_each_combination(cols, d, [&](std::span<const std::size_t> subset) {
    const Vector s = Eigen::JacobiSVD<Matrix>(select_columns(a, subset)).singularValues();
    if (!(s(s.size() - 1) > tol * s(0))) spark = false;
    return spark;
  });
  return spark;
}

Vector flatten_embedding(const Matrix& e) {
  // Eigen storage is column-major, which is exactly the contract.
  return Eigen::Map<const Vector>(e.data(), e.size());
}

}  // namespace permorb
