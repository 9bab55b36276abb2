#include <doctest.h>

#include "rischan/geometry.hpp"
#include "rischan/rng.hpp"
#include "support/oracles.hpp"

using namespace rischan;

namespace {
ArrayGeometry half_wave(int P, int Q, int Mr) {
  ArrayGeometry g;
  g.ris_rows = P;
  g.ris_cols = Q;
  g.bs_antennas = Mr;
  g.wavelength = 1.0;
  g.spacing_x = g.spacing_z = g.bs_spacing = 0.5;
  return g;
}
}  // namespace

TEST_CASE("ris_response single element is 1") {
  const ArrayGeometry g = half_wave(1, 1, 1);
  const CVec a = ris_response(g, {0.7, 1.9});
  REQUIRE(a.size() == 1);
  CHECK(std::abs(a[0] - cdouble{1.0, 0.0}) < 1e-15);
}

TEST_CASE("ris_response broadside gives all ones") {
  const ArrayGeometry g = half_wave(3, 4, 1);
  const CVec a = ris_response(g, {kPi / 2, kPi / 2});
  for (int i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - cdouble{1.0, 0.0}) < 1e-12);
  }
}

TEST_CASE("ris_response matches the scalar element formula") {
  const ArrayGeometry g = half_wave(2, 2, 1);
  const double theta = kPi / 3, phi = kPi / 3;
  const CVec a = ris_response(g, {theta, phi});
  for (int q = 1; q <= 2; ++q) {
    for (int p = 1; p <= 2; ++p) {
      const cdouble want = oracle::ris_entry(g, theta, phi, p, q);
      CHECK(std::abs(a[(q - 1) * 2 + (p - 1)] - want) < 1e-14);
    }
  }
}

TEST_CASE("ris_response entries are unit modulus") {
  const ArrayGeometry g = half_wave(4, 5, 1);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const CVec a = ris_response(g, {rng.uniform(0.05, kPi - 0.05), rng.uniform(0.05, kPi - 0.05)});
    for (int i = 0; i < a.size(); ++i) {
      CHECK(std::abs(std::abs(a[i]) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("ris_response reshapes to a rank-1 P x Q grid") {
  const ArrayGeometry g = half_wave(4, 3, 1);
  const CVec a = ris_response(g, {1.1, 0.8});
  Eigen::Map<const CMat> grid(a.data(), 4, 3);
  // every column must be a scalar multiple of the first one
  for (int q = 1; q < 3; ++q) {
    const cdouble ratio = grid(0, q) / grid(0, 0);
    for (int p = 0; p < 4; ++p) {
      CHECK(std::abs(grid(p, q) - ratio * grid(p, 0)) < 1e-12);
    }
  }
}

TEST_CASE("ris_response conjugate symmetry under flipped spatial frequencies") {
  const ArrayGeometry g = half_wave(3, 4, 1);
  const double theta = 1.2, phi = 0.9;
  const CVec a = ris_response(g, {theta, phi});
  const CVec b = ris_response(g, {kPi - theta, kPi - phi});
  CHECK((b - a.conjugate()).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("ris_response rejects boundary angles") {
  const ArrayGeometry g = half_wave(2, 2, 1);
  CHECK_THROWS_AS((void)ris_response(g, {0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS((void)ris_response(g, {1.0, kPi}), std::domain_error);
}

TEST_CASE("bs_response trivial cases and scalar oracle") {
  ArrayGeometry g = half_wave(1, 1, 6);
  SUBCASE("broadside is all ones") {
    const CVec c = bs_response(g, kPi / 2);
    for (int m = 0; m < 6; ++m) CHECK(std::abs(c[m] - cdouble{1.0, 0.0}) < 1e-12);
  }
  SUBCASE("single antenna") {
    g.bs_antennas = 1;
    const CVec c = bs_response(g, 0.3);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0] - cdouble{1.0, 0.0}) < 1e-15);
  }
  SUBCASE("six entries vs scalar oracle at 80 degrees") {
    const double theta = 80.0 * kPi / 180.0;
    const CVec c = bs_response(g, theta);
    for (int m = 1; m <= 6; ++m) {
      CHECK(std::abs(c[m - 1] - oracle::bs_entry(g, theta, m)) < 1e-14);
    }
  }
  SUBCASE("boundary angle throws") {
    CHECK_THROWS_AS((void)bs_response(g, 0.0), std::domain_error);
  }
}

TEST_CASE("steering derivatives match finite differences") {
  const ArrayGeometry g = half_wave(3, 3, 4);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const double theta = rng.uniform(0.3, kPi - 0.3);
    const double phi = rng.uniform(0.3, kPi - 0.3);
    const RisSteeringDerivs sd = ris_response_derivs(g, {theta, phi});
    const double h = 1e-6;
    const CVec at_p = ris_response(g, {theta + h, phi});
    const CVec at_m = ris_response(g, {theta - h, phi});
    const CVec ap_p = ris_response(g, {theta, phi + h});
    const CVec ap_m = ris_response(g, {theta, phi - h});
    CHECK(((at_p - at_m) / (2 * h) - sd.d_theta).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(((ap_p - ap_m) / (2 * h) - sd.d_phi).lpNorm<Eigen::Infinity>() < 1e-6);
    // second differences need a larger step to beat roundoff
    const double h2 = 1e-4;
    const CVec att_p = ris_response(g, {theta + h2, phi});
    const CVec att_m = ris_response(g, {theta - h2, phi});
    const CVec app_p = ris_response(g, {theta, phi + h2});
    const CVec app_m = ris_response(g, {theta, phi - h2});
    CHECK(((att_p + att_m - 2 * sd.a) / (h2 * h2) - sd.d_theta_theta)
              .lpNorm<Eigen::Infinity>() < 1e-4);
    CHECK(((app_p + app_m - 2 * sd.a) / (h2 * h2) - sd.d_phi_phi)
              .lpNorm<Eigen::Infinity>() < 1e-4);

    const BsSteeringDerivs bd = bs_response_derivs(g, theta);
    const CVec cp = bs_response(g, theta + h);
    const CVec cm = bs_response(g, theta - h);
    CHECK(((cp - cm) / (2 * h) - bd.d_theta).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("geometry validation") {
  ArrayGeometry g = half_wave(2, 2, 2);
  CHECK_NOTHROW(validate(g));
  g.spacing_x = 0.0;
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
  g = half_wave(0, 2, 2);
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
}
