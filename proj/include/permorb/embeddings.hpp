#pragma once

#include "permorb/core.hpp"

namespace permorb {

/// d x D matrix whose columns are projection directions.
class DirectionSet {
 public:
  explicit DirectionSet(Matrix a);

  const Matrix& matrix() const { return a_; }
  std::size_t d() const { return static_cast<std::size_t>(a_.rows()); }
  std::size_t D() const { return static_cast<std::size_t>(a_.cols()); }

 private:
  Matrix a_;
};

/// n x D matrix; column k is the functional applied to the k-th sorted column.
class RowProjector {
 public:
  explicit RowProjector(Matrix b);

  const Matrix& matrix() const { return b_; }

 private:
  Matrix b_;
};

/// M x (nD) linear sketch of the flattened sorted embedding.
class SketchOperator {
 public:
  explicit SketchOperator(Matrix l);

  const Matrix& matrix() const { return l_; }
  std::size_t M() const { return static_cast<std::size_t>(l_.rows()); }

 private:
  Matrix l_;
};

/// n x D matrix with every column non-decreasing.
class SortedEmbedding {
 public:
  /// Throws InvalidInput if some column is not sorted.
  explicit SortedEmbedding(Matrix e);

  const Matrix& matrix() const { return e_; }
  std::size_t n() const { return static_cast<std::size_t>(e_.rows()); }
  std::size_t D() const { return static_cast<std::size_t>(e_.cols()); }

  friend bool operator==(const SortedEmbedding& a, const SortedEmbedding& b) { return a.e_ == b.e_; }

 private:
  Matrix e_;
};

/// Projections X a_k, one column per direction. Each entry is accumulated
/// over the d coordinates in index order, so a row's values do not depend on
/// where the row sits in X; this is what makes the embeddings bitwise
/// permutation invariant.
Matrix project(const DirectionSet& a, const PointCloud& x);

/// Column k is sort_ascending(X a_k).
SortedEmbedding beta(const DirectionSet& a, const PointCloud& x);

/// Entry k is b_k . sort_ascending(X a_k).
Vector delta(const DirectionSet& a, const RowProjector& b, const PointCloud& x);

/// L applied to the column-major flattening of beta(A, X).
Vector beta_sketch(const DirectionSet& a, const SketchOperator& l, const PointCloud& x);

/// beta(A, 1_n z^T): column k is the constant z . a_k.
SortedEmbedding translation_offset(const DirectionSet& a, const Vector& z, std::size_t n);

}  // namespace permorb
