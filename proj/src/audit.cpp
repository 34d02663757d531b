#include "permorb/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "permorb/constructions.hpp"
#include "permorb/metrics.hpp"
#include "permorb/parallel.hpp"

namespace permorb {

namespace {

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

double sigma_d_of(const Matrix& a, std::span<const std::size_t> cols) {
  const Vector s = singular_values(select_columns(a, cols));
  return s(a.rows() - 1);
}

// m-th smallest |a_k . e| for unit e.
double mth_smallest_abs(const Matrix& a, const Vector& e, std::size_t m, std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index k = 0; k < a.cols(); ++k) scratch[static_cast<std::size_t>(k)] = std::abs(a.col(k).dot(e));
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(m - 1), scratch.end());
  return scratch[m - 1];
}

}  // namespace

double upper_lipschitz(const DirectionSet& a) { return singular_values(a.matrix())(0); }

std::size_t subset_bound_min_D(std::size_t n, std::size_t d, std::size_t r) {
  return r * d * ((n - 1) * (n - 1) + 1);
}

SubsetBound subset_sigma_lower_bound(const DirectionSet& a, std::size_t r, std::uint64_t budget) {
  const std::size_t d = a.d();
  const std::size_t D = a.D();
  if (r < 1 || r * d > D) throw InvalidInput("subset bound needs 1 <= r and r*d <= D");
  const std::uint64_t count = binomial(D, r * d);
  if (count > budget) {
    throw BudgetExceeded("subset bound needs C(" + std::to_string(D) + ", " + std::to_string(r * d) +
                         ") = " + std::to_string(count) + " subsets, above the budget " + std::to_string(budget) +
                         "; use the sampled (non-certified) mode");
  }
  SubsetBound out;
  out.r = r;
  out.subset_count = count;
  out.value = std::numeric_limits<double>::infinity();
  for_each_combination(D, r * d, [&](std::span<const std::size_t> cols) {
    out.value = std::min(out.value, sigma_d_of(a.matrix(), cols));
    return true;
  });
  return out;
}

SubsetBound subset_sigma_sampled(const DirectionSet& a, std::size_t r, std::uint64_t samples, RngSeed seed) {
  const std::size_t d = a.d();
  const std::size_t D = a.D();
  if (r < 1 || r * d > D) throw InvalidInput("subset bound needs 1 <= r and r*d <= D");
  if (samples < 1) throw InvalidInput("sampled subset bound needs at least one sample");
  Rng rng(seed);
  SubsetBound out;
  out.r = r;
  out.subset_count = samples;
  out.certified = false;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(D);
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < r * d; ++i) std::swap(idx[i], idx[i + rng.below(D - i)]);
    std::vector<std::size_t> cols(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r * d));
    std::sort(cols.begin(), cols.end());
    out.value = std::min(out.value, sigma_d_of(a.matrix(), cols));
  }
  return out;
}

std::string to_string(PUMethod method) {
  return method == PUMethod::exact_2d_sweep ? "exact-2d-sweep" : "sphere-sampling";
}

PUEstimate projective_uniformity(const DirectionSet& a, std::size_t m, PUMethod method, RngSeed seed,
                                 std::size_t samples) {
  const std::size_t D = a.D();
  const std::size_t d = a.d();
  if (m < 1 || m > D) throw InvalidInput("projective uniformity index m must lie in [1, D]");
  PUEstimate out;
  out.m = m;
  out.method = method;
  out.delta = std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  const Matrix& am = a.matrix();

  if (method == PUMethod::exact_2d_sweep) {
    if (d != 2) throw InvalidInput("exact projective uniformity sweep requires d = 2");
    std::vector<double> angles;
    const std::size_t grid = 256 * D;
    angles.reserve(grid + 2 * D);
    for (std::size_t g = 0; g < grid; ++g) {
      angles.push_back(std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid));
    }
    for (std::size_t k = 0; k < D; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (am(0, kk) == 0.0 && am(1, kk) == 0.0) continue;
      const double theta = std::atan2(am(1, kk), am(0, kk));
      for (const double shift : {std::numbers::pi / 2, -std::numbers::pi / 2}) {
        double t = std::fmod(theta + shift, std::numbers::pi);
        if (t < 0) t += std::numbers::pi;
        angles.push_back(t);
      }
    }
    Vector e(2);
    for (const double t : angles) {
      e << std::cos(t), std::sin(t);
      out.delta = std::min(out.delta, mth_smallest_abs(am, e, m, scratch));
    }
    out.direction_count = angles.size();
    return out;
  }

  const std::size_t count = samples == 0 ? 10000 * d : samples;
  Rng rng(seed);
  Vector e(static_cast<Eigen::Index>(d));
  for (std::size_t s = 0; s < count; ++s) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = rng.normal();
      norm = e.norm();
    } while (norm < 1e-300);
    e /= norm;
    out.delta = std::min(out.delta, mth_smallest_abs(am, e, m, scratch));
  }
  out.direction_count = count;
  return out;
}

double blueprint_lower_bound(double delta, std::size_t m, std::size_t D, std::size_t n) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidInput("blueprint bound needs finite delta >= 0");
  if (m < 1) throw InvalidInput("blueprint bound needs m >= 1");
  const std::size_t excluded = n * n * (m - 1);
  if (excluded > D) {
    throw Inapplicable("blueprint bound is vacuous: n^2 (m - 1) = " + std::to_string(excluded) + " exceeds D = " +
                       std::to_string(D));
  }
  return delta * std::sqrt(static_cast<double>(D - excluded));
}

SqrtnCeiling sqrtn_ceiling(const DirectionSet& a, std::size_t n) {
  if (a.d() < 2) throw InvalidInput("sqrt(n) ceiling needs d >= 2");
  if (n < 1) throw InvalidInput("sqrt(n) ceiling needs n >= 1");
  const Vector s = singular_values(a.matrix());
  const double nn = static_cast<double>(n);
  const double factor = std::sqrt(2.0 + 1.0 / nn) * std::numbers::pi / std::sqrt(nn);
  const auto last = s.size() - 1;
  // With D < d the trailing singular values are zero.
  const double sd = a.D() >= a.d() ? s(last) : 0.0;
  const double sd1 = a.D() >= a.d() ? s(last - 1) : (a.D() + 1 == a.d() ? s(last) : 0.0);
  SqrtnCeiling out;
  out.value = factor * std::sqrt(sd1 * sd1 + sd * sd);
  out.a_independent = factor * std::sqrt(s(0) * s(0) + (s.size() > 1 ? s(1) * s(1) : 0.0));
  return out;
}

AuditReport empirical_distortion(const DirectionSet& a, std::size_t n, std::size_t trials, RngSeed seed,
                                 const DistortionOptions& options) {
  if (n < 1 || n > kEmpiricalMaxRows) {
    throw InvalidInput("empirical distortion supports 1 <= n <= " + std::to_string(kEmpiricalMaxRows));
  }
  if (trials < 1) throw InvalidInput("empirical distortion needs at least one trial");
  const std::size_t d = a.d();
  AuditReport rep;
  rep.n = n;
  rep.seed = seed;
  rep.trials = trials;
  rep.sigma1 = upper_lipschitz(a);
  if (d >= 2) {
    rep.ceiling = sqrtn_ceiling(a, n);
  } else {
    rep.skipped.emplace_back("ceiling_sqrt_n", "requires d >= 2");
  }

  if (options.r) {
    try {
      rep.subset_bound = subset_sigma_lower_bound(a, *options.r, options.budget);
    } catch (const BudgetExceeded& e) {
      rep.skipped.emplace_back("subset_bound", e.what());
    }
  }
  if (options.m) {
    const PUMethod method = d == 2 ? PUMethod::exact_2d_sweep : PUMethod::sphere_sampling;
    rep.pu = projective_uniformity(a, *options.m, method, RngSeed{derive_seed(seed.value, ~0ull)});
    if (method == PUMethod::exact_2d_sweep) {
      try {
        rep.blueprint_bound = blueprint_lower_bound(rep.pu->delta, *options.m, a.D(), n);
      } catch (const Inapplicable& e) {
        rep.skipped.emplace_back("blueprint_bound", e.what());
      }
    } else {
      rep.skipped.emplace_back("blueprint_bound", "delta from sphere sampling is not certified");
    }
  }

  const auto nn = static_cast<Eigen::Index>(n);
  const auto dd = static_cast<Eigen::Index>(d);
  struct Partial {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t count = 0;
  };
  auto ratio_of = [&](const PointCloud& x, const PointCloud& y, Partial& p) {
    const double dist = orbit_distance(x, y).distance;
    if (dist < 1e-8) return;
    const double ratio = embedding_gap(a, x, y) / dist;
    p.lo = std::min(p.lo, ratio);
    p.hi = std::max(p.hi, ratio);
    ++p.count;
  };

  const unsigned workers = std::max(1u, options.threads);
  std::vector<Partial> partial(workers);
  parallel_ranges(trials, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed.value, t));
      const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
      Matrix x = gaussian_matrix(rng, nn, dd, scale);
      Matrix y;
      switch (t % 3) {
        case 0:
          y = gaussian_matrix(rng, nn, dd, scale);
          break;
        case 1: {
          const auto sigma = random_permutation(rng, n);
          const double noise = scale * std::pow(10.0, rng.uniform(-6.0, -1.0));
          y = permute_rows(PointCloud(x), Permutation(sigma)).data() + gaussian_matrix(rng, nn, dd, noise);
          break;
        }
        default: {
          y = x;
          const auto row = static_cast<Eigen::Index>(rng.below(n));
          const double noise = scale * std::pow(10.0, rng.uniform(-3.0, 0.0));
          y.row(row) += gaussian_matrix(rng, 1, dd, noise);
          break;
        }
      }
      ratio_of(PointCloud(std::move(x)), PointCloud(std::move(y)), partial[w]);
    }
  });
  Partial total;
  if (options.include_adversarial && n >= 2 && d >= 2) {
    const CounterexamplePair adv = adversarial_circle_pair(n, d);
    ratio_of(adv.x, adv.y, total);
  }
  for (const auto& p : partial) {
    total.lo = std::min(total.lo, p.lo);
    total.hi = std::max(total.hi, p.hi);
    total.count += p.count;
  }
  if (total.count == 0) throw InvalidInput("empirical distortion: every sampled pair lies on a single orbit");
  rep.empirical_C1 = total.lo;
  rep.empirical_C2 = total.hi;
  rep.pair_count = total.count;
  return rep;
}

std::size_t ose_dimension(std::size_t n, std::size_t d, std::size_t D, double epsilon, double eta, double c) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("eta must lie in (0, 1)");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("constant c must be positive");
  if (n < 1 || d < 1 || D < 1) throw InvalidInput("n, d, D must be positive");
  const double nd2 = 2.0 * static_cast<double>(n) * static_cast<double>(d);
  const double nsq = static_cast<double>(n) * static_cast<double>(n);
  const double inner = nd2 * std::log(1.0 / epsilon) + std::log(1.0 / eta) + nd2 * std::log(static_cast<double>(D) * nsq);
  const double m = std::ceil(c * inner / (epsilon * epsilon));
  if (!(m < 1e15)) throw InvalidInput("sketch dimension overflows");
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

SketchOperator gaussian_sketch(std::size_t n, std::size_t D, std::size_t M, RngSeed seed) {
  if (M < 1 || n < 1 || D < 1) throw InvalidInput("gaussian_sketch needs M, n, D >= 1");
  Rng rng(seed);
  return SketchOperator(gaussian_matrix(rng, static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(n * D),
                                        1.0 / std::sqrt(static_cast<double>(M))));
}

OseReport ose_check(const DirectionSet& a, const SketchOperator& l, std::size_t n, double epsilon,
                    std::size_t trials, RngSeed seed) {
  if (static_cast<std::size_t>(l.matrix().cols()) != n * a.D()) {
    throw DimensionError("sketch operator needs n*D = " + std::to_string(n * a.D()) + " columns");
  }
  OseReport out;
  const auto nn = static_cast<Eigen::Index>(n);
  const auto dd = static_cast<Eigen::Index>(a.d());
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed.value, t));
    const PointCloud x(gaussian_matrix(rng, nn, dd, 1.0));
    const PointCloud y(gaussian_matrix(rng, nn, dd, 1.0));
    const Vector diff = flatten_embedding(beta(a, x).matrix()) - flatten_embedding(beta(a, y).matrix());
    const double denom = diff.norm();
    if (denom < 1e-10) {
      ++out.skipped;
      continue;
    }
    const double rho = (l.matrix() * diff).norm() / denom;
    ++out.evaluated;
    out.max_ratio_error = std::max(out.max_ratio_error, std::abs(rho - 1.0));
    if (rho < 1.0 - epsilon || rho > 1.0 + epsilon) ++out.violations;
  }
  return out;
}

boost::multiprecision::cpp_int region_count_bound(std::size_t n, std::size_t d, std::size_t D) {
  const boost::multiprecision::cpp_int base = boost::multiprecision::cpp_int(D) * n * n;
  return boost::multiprecision::pow(base, static_cast<unsigned>(2 * n * d));
}

}  // namespace permorb
