#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "permorb/core.hpp"
#include "permorb/io.hpp"
#include "permorb/rng.hpp"

namespace testutil {

inline permorb::Matrix gaussian(permorb::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  permorb::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

// Independent n! oracle: plain next_permutation over row matchings.
inline double bruteforce_dist(const permorb::Matrix& x, const permorb::Matrix& y) {
  std::vector<int> p(static_cast<std::size_t>(x.rows()));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += (x.row(i) - y.row(p[static_cast<std::size_t>(i)])).squaredNorm();
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return std::sqrt(best);
}

inline std::string data_path(const std::string& name) { return std::string(PERMORB_TEST_DATA) + "/" + name; }

}  // namespace testutil
