// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "hardening/array_geometry.hpp"
#include "hardening/mc_engine.hpp"
#include "hardening/ray_channel.hpp"

using namespace hardening;

namespace {

RngStream test_rng(std::uint64_t stream = 0) {
  return SeedSpec{0xA11CE5ULL, stream}.trial_stream(0);
}

double min_pair_distance(const ArrayTopology& array) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < array.size(); ++i) {
    for (Eigen::Index j = i + 1; j < array.size(); ++j) {
      best = std::min(best,
                      (array.positions().col(i) - array.positions().col(j)).norm());
    }
  }
  return best;
}

}  // namespace

TEST_CASE("make_ula basics") {
  const ArrayTopology single = make_ula(1, 0.5, 1.0);
  CHECK(single.size() == 1);
  CHECK(single.positions().col(0).norm() == 0.0);

  const ArrayTopology pair = make_ula(2, 0.5, 1.0);
  CHECK(pair.positions()(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(pair.positions()(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pair.positions().row(1).norm() == 0.0);
  CHECK(pair.positions().row(2).norm() == 0.0);

  const ArrayTopology four = make_ula(4, 0.5, 1.0);
  for (Eigen::Index i = 0; i + 1 < 4; ++i) {
    const double d =
        (four.positions().col(i + 1) - four.positions().col(i)).norm();
    CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(four.positions().rowwise().mean().norm() < 1e-12);

  CHECK_THROWS_AS(make_ula(0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_ula(4, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_ula(4, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("make_uca chord spacing and circumradius") {
  const ArrayTopology square = make_uca(4, std::sqrt(2.0) * 0.7, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double chord = (square.positions().col((i + 1) % 4) -
                          square.positions().col(i)).norm();
    CHECK(chord == doctest::Approx(std::sqrt(2.0) * 0.7).epsilon(1e-12));
  }

  const ArrayTopology triangle = make_uca(3, 0.5, 1.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = i + 1; j < 3; ++j) {
      CHECK((triangle.positions().col(i) - triangle.positions().col(j)).norm() ==
            doctest::Approx(0.5).epsilon(1e-12));
    }
  }

  // circumradius r = spacing / (2 sin(pi/8)) for n = 8
  const ArrayTopology octagon = make_uca(8, 0.5, 1.0);
  const double expected_radius = 0.5 / (2.0 * std::sin(kPi / 8.0));
  CHECK(expected_radius == doctest::Approx(0.6532814824381883).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(octagon.positions().col(i).norm() ==
          doctest::Approx(expected_radius).epsilon(1e-12));
  }
  CHECK(octagon.positions().rowwise().mean().norm() < 1e-12);

  CHECK_THROWS_AS(make_uca(1, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("make_upa near-square factorization") {
  CHECK(upa_grid_shape(4) == std::pair<Eigen::Index, Eigen::Index>{2, 2});
  CHECK(upa_grid_shape(6) == std::pair<Eigen::Index, Eigen::Index>{2, 3});
  CHECK(upa_grid_shape(7) == std::pair<Eigen::Index, Eigen::Index>{1, 7});
  CHECK(upa_grid_shape(16) == std::pair<Eigen::Index, Eigen::Index>{4, 4});
  CHECK(upa_grid_shape(64) == std::pair<Eigen::Index, Eigen::Index>{8, 8});

  const ArrayTopology grid = make_upa(4, 0.5, 1.0);
  CHECK(min_pair_distance(grid) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(grid.positions().rowwise().mean().norm() < 1e-12);

  const ArrayTopology grid6 = make_upa(6, 0.5, 1.0);
  CHECK(grid6.size() == 6);
  // 2x3 grid spans 1 cell along x and 2 cells along y
  CHECK(grid6.positions().row(0).maxCoeff() -
            grid6.positions().row(0).minCoeff() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(grid6.positions().row(1).maxCoeff() -
            grid6.positions().row(1).minCoeff() ==
        doctest::Approx(1.0).epsilon(1e-12));

  // prime count degenerates to a line
  const ArrayTopology line = make_upa(7, 0.5, 1.0);
  CHECK(line.positions().row(0).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 0; i + 1 < 7; ++i) {
    CHECK((line.positions().col(i + 1) - line.positions().col(i)).norm() ==
          doctest::Approx(0.5).epsilon(1e-12));
  }

  CHECK_THROWS_AS(make_upa(0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_upa(4, -0.5, 1.0), std::invalid_argument);
}

TEST_CASE("topology validation") {
  Eigen::Matrix3Xd coincident(3, 2);
  coincident.setZero();
  CHECK_THROWS_AS(ArrayTopology(coincident, 1.0), std::invalid_argument);

  Eigen::Matrix3Xd bad(3, 1);
  bad.setZero();
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(ArrayTopology(bad, 1.0), std::invalid_argument);
}

TEST_CASE("steering vector examples from the defining formula") {
  // single antenna: entry exactly 1
  const ArrayTopology single = make_ula(1, 0.5, 1.0);
  const Eigen::VectorXcd e1 = steering_vector(single, Vec3(0, 0, 1));
  CHECK(e1.size() == 1);
  CHECK(std::abs(e1(0) - Complex(1.0, 0.0)) < 1e-15);

  // direction orthogonal to the ULA axis: all entries 1/sqrt(N)
  const ArrayTopology ula = make_ula(4, 0.5, 1.0);
  const Eigen::VectorXcd e_orth = steering_vector(ula, Vec3(0, 0, 1));
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(std::abs(e_orth(i) - Complex(0.5, 0.0)) < 1e-12);
  }

  // n=2, lambda=1, spacing 1/2, direction along the axis:
  // entries (1/sqrt(2)) e^{-j pi/2}, (1/sqrt(2)) e^{+j pi/2}
  const ArrayTopology pair = make_ula(2, 0.5, 1.0);
  const Eigen::VectorXcd e_axis = steering_vector(pair, Vec3(1, 0, 0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e_axis(0) - Complex(0.0, -inv_sqrt2)) < 1e-12);
  CHECK(std::abs(e_axis(1) - Complex(0.0, inv_sqrt2)) < 1e-12);

  CHECK_THROWS_AS(steering_vector(pair, Vec3(1, 1, 0)), std::invalid_argument);
}

TEST_CASE("steering vectors are unit norm for random topologies") {
  RngStream rng = test_rng(1);
  const ArrayTopology arrays[] = {
      make_ula(5, 0.37, 0.8), make_uca(9, 0.22, 1.3), make_upa(12, 0.61, 2.0)};
  for (const auto& array : arrays) {
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXcd e =
          steering_vector(array, uniform_sphere_direction(rng));
      CHECK(std::abs(e.norm() - 1.0) <= 1e-12);
      const double expected_modulus = 1.0 / std::sqrt(double(array.size()));
      for (Eigen::Index k = 0; k < e.size(); ++k) {
        CHECK(std::abs(std::abs(e(k)) - expected_modulus) <= 1e-12);
      }
    }
  }
}

TEST_CASE("steering_correlation special values") {
  const ArrayTopology ula = make_ula(6, 0.5, 1.0);
  RngStream rng = test_rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec3 d = uniform_sphere_direction(rng);
    CHECK(steering_correlation(ula, d, d) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const ArrayTopology single = make_ula(1, 0.5, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    CHECK(steering_correlation(single, d1, d2) == 1.0);
  }

  // ULA n=2 at lambda/2, axis-parallel vs anti-parallel: the direct
  // evaluation of the steering inner product is the oracle.
  const ArrayTopology pair = make_ula(2, 0.5, 1.0);
  const Vec3 along(1, 0, 0);
  const Vec3 anti(-1, 0, 0);
  const Eigen::VectorXcd ea = steering_vector(pair, along);
  const Eigen::VectorXcd eb = steering_vector(pair, anti);
  const double direct = std::norm(ea.dot(eb));
  CHECK(steering_correlation(pair, along, anti) ==
        doctest::Approx(direct).epsilon(1e-12));
  CHECK(direct == doctest::Approx(1.0).epsilon(1e-12));  // pi phase aliasing
}

TEST_CASE("steering_correlation equals the inner-product route") {
  RngStream rng = test_rng(3);
  const ArrayTopology array = make_upa(6, 0.48, 1.1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const double via_vectors =
        std::norm(steering_vector(array, d1).dot(steering_vector(array, d2)));
    const double direct = steering_correlation(array, d1, d2);
    CHECK(direct == doctest::Approx(via_vectors).epsilon(1e-11));
    CHECK(direct >= 0.0);
    CHECK(direct <= 1.0);
  }
}

TEST_CASE("steering_correlation symmetry, translation and rotation invariance") {
  RngStream rng = test_rng(4);
  const ArrayTopology array = make_uca(8, 0.5, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const double base = steering_correlation(array, d1, d2);
    CHECK(steering_correlation(array, d2, d1) ==
          doctest::Approx(base).epsilon(1e-12));

    const Vec3 offset(5.0 * rng.normal(), 5.0 * rng.normal(), 5.0 * rng.normal());
    CHECK(steering_correlation(array.translated(offset), d1, d2) ==
          doctest::Approx(base).epsilon(1e-9));

    Eigen::Matrix3d g;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g(r, c) = rng.normal();
    }
    const Eigen::Matrix3d q =
        Eigen::HouseholderQR<Eigen::Matrix3d>(g).householderQ();
    CHECK(steering_correlation(array.rotated(q), (q * d1).normalized(),
                               (q * d2).normalized()) ==
          doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("ULA correlation depends only on the axis projection of d1 - d2") {
  RngStream rng = test_rng(5);
  const ArrayTopology ula = make_ula(7, 0.44, 1.0);
  int tested = 0;
  while (tested < 100) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const double proj = (d2 - d1).x();
    const Vec3 e1 = uniform_sphere_direction(rng);
    const double x2 = e1.x() + proj;
    if (std::abs(x2) > 0.999) continue;
    const double r = std::sqrt(1.0 - x2 * x2);
    const double phi = 2.0 * kPi * rng.uniform();
    const Vec3 e2(x2, r * std::cos(phi), r * std::sin(phi));
    CHECK(steering_correlation(ula, d1, d2) ==
          doctest::Approx(steering_correlation(ula, e1, e2)).epsilon(1e-9));
    ++tested;
  }
}
