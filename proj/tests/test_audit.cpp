#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "permorb/audit.hpp"
#include "permorb/constructions.hpp"
#include "permorb/metrics.hpp"

using namespace permorb;

namespace {

// Smallest singular value of a 2x2 matrix in closed form.
double sigma_min_2x2(double a, double b, double c, double d) {
  const double t = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  return std::sqrt(std::max(0.0, (t - std::sqrt(std::max(0.0, t * t - 4 * det * det))) / 2));
}

}  // namespace

TEST_SUITE("audit") {
  TEST_CASE("upper Lipschitz constant") {
    CHECK(upper_lipschitz(circle_directions(36)) == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
    CHECK(upper_lipschitz(DirectionSet(Matrix::Identity(3, 3))) == doctest::Approx(1.0));
    Rng rng(1);
    const DirectionSet a(testutil::gaussian(rng, 3, 8));
    const double s1 = upper_lipschitz(a);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const PointCloud x(testutil::gaussian(rng, 4, 3)), y(testutil::gaussian(rng, 4, 3));
      worst = std::max(worst, embedding_gap(a, x, y) / orbit_distance(x, y).distance);
    }
    CHECK(worst <= s1 * (1 + 1e-9));
  }

  TEST_CASE("subset sigma bound") {
    CHECK(subset_sigma_lower_bound(DirectionSet(Matrix::Identity(2, 2)), 1).value == doctest::Approx(1.0));
    CHECK(subset_sigma_lower_bound(DirectionSet(Matrix{{3.0, 4.0}}), 1).value == doctest::Approx(3.0));
    const auto a = gaussian_directions(2, 10, RngSeed{21});
    const auto exact = subset_sigma_lower_bound(a, 1);
    CHECK(exact.subset_count == 45);
    CHECK(exact.certified);
    double oracle = std::numeric_limits<double>::infinity();
    const Matrix& m = a.matrix();
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j) oracle = std::min(oracle, sigma_min_2x2(m(0, i), m(0, j), m(1, i), m(1, j)));
    CHECK(std::abs(exact.value - oracle) <= 1e-12);
    const auto sampled = subset_sigma_sampled(a, 1, 20, RngSeed{3});
    CHECK(!sampled.certified);
    CHECK(sampled.value >= exact.value);
    CHECK_THROWS_AS(subset_sigma_lower_bound(gaussian_directions(3, 40, RngSeed{1}), 2, 1000), BudgetExceeded);
    CHECK_THROWS_AS(subset_sigma_lower_bound(a, 6), InvalidInput);
    CHECK(subset_bound_min_D(3, 2, 1) == 10);
  }

  TEST_CASE("projective uniformity") {
    for (const std::size_t n : {3u, 4u, 6u}) {
      const std::size_t D = 4 * n * n;
      const auto pu = projective_uniformity(circle_directions(D), 3, PUMethod::exact_2d_sweep);
      CHECK(pu.delta >= 2.0 / static_cast<double>(D));
      // Closed form for the circle frame: the worst direction sits midway
      // between two perpendiculars, giving sin(pi / D).
      CHECK(std::abs(pu.delta - std::sin(std::numbers::pi / static_cast<double>(D))) <= 1e-12);
      CHECK(pu.direction_count >= 256 * D);
    }
    const auto id = projective_uniformity(DirectionSet(Matrix::Identity(2, 2)), 2, PUMethod::exact_2d_sweep);
    CHECK(id.delta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(projective_uniformity(DirectionSet(Matrix{{1.0}, {2.0}}), 1, PUMethod::exact_2d_sweep).delta <= 1e-15);
    CHECK_THROWS_AS(projective_uniformity(circle_directions(8), 0, PUMethod::exact_2d_sweep), InvalidInput);
    CHECK_THROWS_AS(projective_uniformity(circle_directions(8), 9, PUMethod::exact_2d_sweep), InvalidInput);
    CHECK_THROWS_AS(projective_uniformity(gaussian_directions(3, 8, RngSeed{1}), 2, PUMethod::exact_2d_sweep),
                    InvalidInput);
    const auto a = gaussian_directions(2, 12, RngSeed{4});
    const auto exact = projective_uniformity(a, 3, PUMethod::exact_2d_sweep);
    const auto sampled = projective_uniformity(a, 3, PUMethod::sphere_sampling, RngSeed{5});
    CHECK(sampled.direction_count == 20000);
    CHECK(sampled.delta >= exact.delta - 1e-12);
  }

  TEST_CASE("blueprint bound") {
    for (const std::size_t n : {2u, 3u, 5u}) {
      const std::size_t D = 4 * n * n;
      const double v = blueprint_lower_bound(2.0 / static_cast<double>(D), 3, D, n);
      CHECK(v == doctest::Approx(1.0 / (std::sqrt(2.0) * static_cast<double>(n))).epsilon(1e-12));
    }
    CHECK(blueprint_lower_bound(0.5, 1, 16, 3) == doctest::Approx(2.0));
    CHECK(blueprint_lower_bound(0.0, 2, 16, 2) == 0.0);
    CHECK_THROWS_AS(blueprint_lower_bound(0.5, 3, 10, 3), Inapplicable);
  }

  TEST_CASE("sqrt(n) ceiling") {
    const auto c = sqrtn_ceiling(DirectionSet(Matrix::Identity(2, 2)), 4);
    CHECK(c.value == doctest::Approx(1.5 * std::numbers::pi * std::sqrt(2.0) / 2.0).epsilon(1e-12));
    const auto a = gaussian_directions(3, 7, RngSeed{2});
    const auto c1 = sqrtn_ceiling(a, 5);
    const auto c2 = sqrtn_ceiling(DirectionSet(2.0 * a.matrix()), 5);
    CHECK(c2.value == doctest::Approx(2.0 * c1.value).epsilon(1e-12));
    CHECK(c2.a_independent == doctest::Approx(2.0 * c1.a_independent).epsilon(1e-12));
    CHECK_THROWS_AS(sqrtn_ceiling(DirectionSet(Matrix{{1.0, 2.0}}), 3), InvalidInput);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const std::size_t d = 2 + s % 3, n = 3 + s % 5;
      const auto r = gaussian_directions(d, 3 + s % 9, RngSeed{s});
      const auto pair = adversarial_circle_pair(n, d);
      CHECK(embedding_gap(r, pair.x, pair.y) <= sqrtn_ceiling(r, n).a_independent);
    }
  }

  TEST_CASE("ose dimension and sketch") {
    CHECK(ose_dimension(1, 1, 2, 0.5, 0.5, 1.0) == 14);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double eps = 0.05; eps < 1.0; eps += 0.05) {
      const std::size_t m = ose_dimension(3, 2, 7, eps, 0.1, 4.0);
      CHECK(m <= prev);
      prev = m;
    }
    const std::size_t m1 = ose_dimension(3, 2, 7, 0.25, 0.1, 1.0), m2 = ose_dimension(3, 2, 7, 0.25, 0.1, 2.0);
    CHECK(m2 >= 2 * m1 - 1);
    CHECK(m2 <= 2 * m1);
    CHECK_THROWS_AS(ose_dimension(3, 2, 7, 1.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(ose_dimension(3, 2, 7, 0.5, 0.0), InvalidInput);
    CHECK_THROWS_AS(ose_dimension(3, 2, 7, 0.5, 0.5, 0.0), InvalidInput);

    const auto l = gaussian_sketch(3, 7, 32, RngSeed{1});
    CHECK(l.matrix().rows() == 32);
    CHECK(l.matrix().cols() == 21);
    CHECK(l.matrix() == gaussian_sketch(3, 7, 32, RngSeed{1}).matrix());
    Rng rng(2);
    const Vector x = testutil::gaussian(rng, 21, 1);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 10000; ++s) acc += (gaussian_sketch(3, 7, 32, RngSeed{s}).matrix() * x).squaredNorm();
    CHECK(std::abs(acc / 10000 / x.squaredNorm() - 1.0) <= 0.05);
  }

  TEST_CASE("ose check") {
    const auto a = gaussian_directions(2, 3, RngSeed{3});
    Eigen::HouseholderQR<Matrix> qr(gaussian_directions(12, 12, RngSeed{4}).matrix());
    const Matrix q = qr.householderQ();
    const auto rep = ose_check(a, SketchOperator(q), 4, 0.01, 200, RngSeed{5});
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio_error <= 1e-12);
    CHECK(rep.evaluated == 200);
    const auto wide = ose_check(a, gaussian_sketch(4, 3, 2, RngSeed{6}), 4, 1.0, 200, RngSeed{7});
    CHECK(wide.evaluated == 200);
    CHECK_THROWS_AS(ose_check(a, SketchOperator(q), 3, 0.1, 1, RngSeed{1}), DimensionError);
  }

  TEST_CASE("region count bound") {
    CHECK(region_count_bound(1, 1, 1) == 1);
    CHECK(region_count_bound(2, 1, 2) == 4096);
    const auto r = region_count_bound(3, 2, 7);
    CHECK(r == boost::multiprecision::pow(boost::multiprecision::cpp_int(63), 12));
    CHECK(region_count_bound(3, 2, 7).str() == "3909188328478827879681");
  }

  TEST_CASE("empirical distortion") {
    const auto a = gaussian_directions(2, 10, RngSeed{8});
    DistortionOptions opt;
    opt.r = 1;
    opt.m = 3;
    const auto rep = empirical_distortion(a, 3, 600, RngSeed{9}, opt);
    CHECK(rep.empirical_C1 <= rep.empirical_C2);
    CHECK(rep.empirical_C2 <= rep.sigma1 * (1 + 1e-9));
    REQUIRE(rep.subset_bound);
    CHECK(rep.subset_bound->value <= rep.empirical_C1 * (1 + 1e-6));
    REQUIRE(rep.pu);
    CHECK(rep.pu->method == PUMethod::exact_2d_sweep);
    CHECK(!rep.blueprint_bound);  // n^2 (m - 1) = 18 > D = 10
    CHECK(rep.pair_count <= 601);
    CHECK(rep.pair_count >= 590);

    opt.threads = 3;
    const auto again = empirical_distortion(a, 3, 600, RngSeed{9}, opt);
    CHECK(again.empirical_C1 == rep.empirical_C1);
    CHECK(again.empirical_C2 == rep.empirical_C2);

    DistortionOptions pu_only;
    pu_only.m = 3;
    const auto circ = empirical_distortion(circle_directions(64), 4, 900, RngSeed{1}, pu_only);
    REQUIRE(circ.blueprint_bound);
    CHECK(circ.empirical_C1 >= *circ.blueprint_bound);
    CHECK(circ.empirical_C2 <= circ.sigma1 * (1 + 1e-9));

    CHECK_THROWS_AS(empirical_distortion(a, 9, 10, RngSeed{1}), InvalidInput);
    CHECK_THROWS_AS(empirical_distortion(a, 3, 0, RngSeed{1}), InvalidInput);
    DistortionOptions tight;
    tight.r = 2;
    tight.budget = 10;
    const auto partial = empirical_distortion(a, 3, 30, RngSeed{2}, tight);
    CHECK(!partial.subset_bound);
    REQUIRE(partial.skipped.size() == 1);
    CHECK(partial.skipped[0].first == "subset_bound");
  }
}
