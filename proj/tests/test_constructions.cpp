#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "permorb/constructions.hpp"
#include "permorb/metrics.hpp"

using namespace permorb;

TEST_SUITE("constructions") {
  TEST_CASE("gaussian directions") {
    const auto a = gaussian_directions(1000, 1000, RngSeed{17});
    CHECK(a.matrix() == gaussian_directions(1000, 1000, RngSeed{17}).matrix());
    const double mean = a.matrix().mean();
    const double var = (a.matrix().array() - mean).square().mean();
    CHECK(std::abs(mean) <= 4e-3);
    CHECK(std::abs(var - 1.0) <= 0.01);
    CHECK_THROWS_AS(gaussian_directions(0, 3, RngSeed{1}), InvalidInput);
  }

  TEST_CASE("sphere directions") {
    const auto a = sphere_directions(3, 100000, RngSeed{5});
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.matrix().cols(); ++k) worst = std::max(worst, std::abs(a.matrix().col(k).norm() - 1.0));
    CHECK(worst <= 1e-12);
    CHECK(a.matrix().rowwise().mean().norm() <= 0.02);
    const auto s1 = sphere_directions(1, 50, RngSeed{2});
    CHECK((s1.matrix().array().abs() == 1.0).all());
  }

  TEST_CASE("circle directions") {
    const auto a4 = circle_directions(4);
    const Matrix expect{{0.0, -1.0, 0.0, 1.0}, {1.0, 0.0, -1.0, 0.0}};
    CHECK((a4.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-15);
    const auto a64 = circle_directions(64);
    const Vector s = singular_values(a64.matrix());
    CHECK(std::abs(s(0) - std::sqrt(32.0)) <= 1e-9);
    CHECK(std::abs(s(1) - std::sqrt(32.0)) <= 1e-9);
    for (const std::size_t D : {3u, 7u, 36u, 256u}) {
      const Matrix g = circle_directions(D).matrix() * circle_directions(D).matrix().transpose();
      CHECK((g - (static_cast<double>(D) / 2.0) * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    CHECK_THROWS_AS(circle_directions(1), InvalidInput);
  }

  TEST_CASE("matousek counterexample d=2, D=3") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = gaussian_directions(2, 3, RngSeed{seed});
      const auto pair = matousek_counterexample(a, RngSeed{seed + 100});
      REQUIRE(pair.x.n() == 4);
      REQUIRE(pair.y.n() == 4);
      int x_zero = 0, y_zero = 0;
      double vmax = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        x_zero += pair.x.row(i).norm() == 0.0;
        y_zero += pair.y.row(i).norm() == 0.0;
        vmax = std::max({vmax, pair.x.row(i).norm(), pair.y.row(i).norm()});
      }
      CHECK(x_zero == 1);
      CHECK(y_zero == 0);
      const Matrix gap = beta(a, pair.x).matrix() - beta(a, pair.y).matrix();
      CHECK(gap.cwiseAbs().maxCoeff() <= 1e-9 * a.matrix().norm() * vmax);
      CHECK(orbit_distance(pair.x, pair.y).distance > 0.0);
    }
  }

  TEST_CASE("matousek counterexample shapes and limits") {
    CHECK(matousek_rows(3, 4) == 2);
    CHECK(matousek_rows(2, 3) == 4);
    CHECK(matousek_rows(4, 6) == 2);
    const auto pair = matousek_counterexample(gaussian_directions(3, 4, RngSeed{1}), RngSeed{2});
    CHECK(pair.x.n() == 2);
    CHECK(pair.certificate.at("alphas").size() == 2);
    CHECK_THROWS_AS(matousek_counterexample(gaussian_directions(1, 3, RngSeed{1}), RngSeed{1}), InvalidInput);
    MatousekOptions small;
    small.max_rows = 4;
    CHECK_THROWS_AS(matousek_counterexample(gaussian_directions(2, 5, RngSeed{1}), RngSeed{1}, small), InvalidInput);
  }

  TEST_CASE("adversarial circle pair") {
    const auto p = adversarial_circle_pair(8, 5);
    CHECK(std::abs(orbit_distance(p.x, p.y).distance - 1.0) <= 1e-9);
    CHECK(p.x.data().leftCols(3).isZero());
    CHECK(p.y.row(0).isZero());
    CHECK(p.x.data().bottomRows(7) == p.y.data().bottomRows(7));

    const auto q = adversarial_circle_pair(8, 2);
    const auto a = circle_directions(256);
    const Vector s = singular_values(a.matrix());
    const double ratio = embedding_gap(a, q.x, q.y) / orbit_distance(q.x, q.y).distance;
    const double bound = std::sqrt(2.0 + 1.0 / 8.0) * std::numbers::pi / std::sqrt(8.0) *
                         std::sqrt(s(0) * s(0) + s(1) * s(1));
    CHECK(ratio <= bound);
    CHECK_THROWS_AS(adversarial_circle_pair(1, 2), InvalidInput);
  }

  TEST_CASE("identity augmented") {
    const auto a = identity_augmented(Matrix::Ones(3, 1));
    CHECK(a.matrix() == Matrix{{1.0, 0.0, 0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 1.0}});
    const Matrix literal{{1, 0, 0, 0.56, 0.66, 0.21}, {0, 1, 0, 0.24, 0.58, 0}, {0, 0, 1, 0.71, 0.53, 0.45}};
    CHECK(read_csv_matrix(testutil::data_path("a_n3_d3_D6.csv")) == literal);
    const auto tail = Matrix{{0.56, 0.66, 0.21}, {0.24, 0.58, 0.0}, {0.71, 0.53, 0.45}};
    CHECK(identity_augmented(tail).matrix() == literal);
    CHECK(is_full_spark(read_csv_matrix(testutil::data_path("a_n5_d2_D5.csv"))));
  }
}
