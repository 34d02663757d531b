#include "permorb/embeddings.hpp"

#include <algorithm>
#include <string>

namespace permorb {

namespace {

void check_cloud(const DirectionSet& a, const PointCloud& x) {
  if (x.d() != a.d()) {
    throw DimensionError("point cloud has " + std::to_string(x.d()) + " features but directions have dimension " +
                         std::to_string(a.d()));
  }
}

}  // namespace

DirectionSet::DirectionSet(Matrix a) : a_(std::move(a)) { require_valid(a_, "direction set"); }

RowProjector::RowProjector(Matrix b) : b_(std::move(b)) { require_valid(b_, "row projector"); }

SketchOperator::SketchOperator(Matrix l) : l_(std::move(l)) { require_valid(l_, "sketch operator"); }

SortedEmbedding::SortedEmbedding(Matrix e) : e_(std::move(e)) {
  require_valid(e_, "sorted embedding");
  for (Eigen::Index k = 0; k < e_.cols(); ++k) {
    for (Eigen::Index i = 1; i < e_.rows(); ++i) {
      if (e_(i - 1, k) > e_(i, k)) {
        throw InvalidInput("sorted embedding: column " + std::to_string(k + 1) + " is not non-decreasing");
      }
    }
  }
}

Matrix project(const DirectionSet& a, const PointCloud& x) {
  check_cloud(a, x);
  const Matrix& am = a.matrix();
  const Matrix& xm = x.data();
  Matrix p(xm.rows(), am.cols());
  for (Eigen::Index k = 0; k < am.cols(); ++k) {
    for (Eigen::Index i = 0; i < xm.rows(); ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < xm.cols(); ++j) s += xm(i, j) * am(j, k);
      p(i, k) = s;
    }
  }
  return p;
}

SortedEmbedding beta(const DirectionSet& a, const PointCloud& x) {
  Matrix p = project(a, x);
  for (Eigen::Index k = 0; k < p.cols(); ++k) {
    double* col = p.col(k).data();
    std::sort(col, col + p.rows());
  }
  return SortedEmbedding(std::move(p));
}

Vector delta(const DirectionSet& a, const RowProjector& b, const PointCloud& x) {
  const Matrix& bm = b.matrix();
  if (static_cast<std::size_t>(bm.cols()) != a.D() || static_cast<std::size_t>(bm.rows()) != x.n()) {
    throw DimensionError("row projector must be n x D = " + std::to_string(x.n()) + " x " + std::to_string(a.D()));
  }
  const Matrix e = beta(a, x).matrix();
  Vector out(e.cols());
  for (Eigen::Index k = 0; k < e.cols(); ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i) s += bm(i, k) * e(i, k);
    out(k) = s;
  }
  return out;
}

Vector beta_sketch(const DirectionSet& a, const SketchOperator& l, const PointCloud& x) {
  const auto expected = x.n() * a.D();
  if (static_cast<std::size_t>(l.matrix().cols()) != expected) {
    throw DimensionError("sketch operator needs n*D = " + std::to_string(expected) + " columns, has " +
                         std::to_string(l.matrix().cols()));
  }
  return l.matrix() * flatten_embedding(beta(a, x).matrix());
}

SortedEmbedding translation_offset(const DirectionSet& a, const Vector& z, std::size_t n) {
  if (static_cast<std::size_t>(z.size()) != a.d()) {
    throw DimensionError("translation vector must have dimension " + std::to_string(a.d()));
  }
  if (n < 1) throw InvalidInput("translation_offset: n must be positive");
  Matrix ones_z = Matrix::Ones(static_cast<Eigen::Index>(n), 1) * z.transpose();
  return beta(a, PointCloud(std::move(ones_z)));
}

}  // namespace permorb
