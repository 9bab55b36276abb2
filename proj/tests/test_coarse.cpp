#include <doctest.h>

#include "rischan/coarse.hpp"
#include "rischan/rng.hpp"
#include "rischan/synth.hpp"
#include "support/oracles.hpp"

using namespace rischan;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.n_theta = 8;
  g.n_phi = 8;
  g.n_zeta = 64;
  g.n_xi = 16;
  g.n_theta_bar = 8;
  g.n_zeta_bar = 64;
  g.n_xi_bar = 16;
  return g;
}

// Scene whose parameters sit exactly on the coarse mesh.
struct OnGrid {
  Scene scene;
  double zeta, xi, theta, phi;
};

OnGrid on_grid_scene(const oracle::SmallSetup& s, const GridSpec& grid) {
  OnGrid og;
  const int bin_phi = 2;
  const int bin_theta = grid.n_theta - 1;  // wraps to f_y = -1/8
  const int bin_zeta = grid.n_zeta - 2;    // zeta = -2/64
  const int bin_xi = 1;
  const double fx = static_cast<double>(bin_phi) / grid.n_phi;
  const double fy = static_cast<double>(bin_theta) / grid.n_theta - 1.0;
  og.phi = std::acos(s.geom.wavelength * fx / s.geom.spacing_z);
  og.theta = std::acos(-s.geom.wavelength * fy / (s.geom.spacing_x * std::sin(og.phi)));
  og.zeta = static_cast<double>(bin_zeta) / grid.n_zeta - 1.0;
  og.xi = static_cast<double>(bin_xi) / grid.n_xi / s.plan.symbol_length;
  const double tau = (og.xi - og.zeta) * s.pilot.zc_length;
  og.scene.ris_paths.push_back({tau, og.xi, og.theta, og.phi, cdouble{0.8, 0.4}});
  return og;
}

}  // namespace

TEST_CASE("denominator gamma: single element is flat") {
  oracle::SmallSetup s = oracle::small_setup(31, 1, 0, 1, 1, 1);
  const GridSpec grid = small_grid();
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  const double w2 = std::norm(mixing_matrix(s.plan, 1)(0, 0));
  for (int n = 0; n < cache.gamma.size(); ++n) {
    CHECK(cache.gamma[n] == doctest::Approx(w2).epsilon(1e-12));
  }
}

TEST_CASE("denominator gamma: identical observations add K times") {
  oracle::SmallSetup s = oracle::small_setup(32, 3, 0);
  for (auto& phi : s.plan.phases) phi = s.plan.phases[0];
  const GridSpec grid = small_grid();
  const DenominatorCache cache3 = precompute_denominator(s.plan, grid);
  oracle::SmallSetup s1 = s;
  s1.plan.ris_on_count = 1;
  s1.plan.phases.resize(1);
  const DenominatorCache cache1 = precompute_denominator(s1.plan, grid);
  CHECK((cache3.gamma - 3.0 * cache1.gamma).lpNorm<Eigen::Infinity>() <
        1e-10 * cache3.gamma.maxCoeff());
}

TEST_CASE("denominator gamma matches the brute-force angle sweep") {
  const oracle::SmallSetup s = oracle::small_setup(33, 2, 0, 2, 2, 2);
  const GridSpec grid = small_grid();
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  for (int n = 0; n < grid.n_phi * grid.n_theta; ++n) {
    const double fx = static_cast<double>(n % grid.n_phi) / grid.n_phi;
    const double fy = static_cast<double>(n / grid.n_phi) / grid.n_theta;
    const CVec a = oracle::grid_steering(2, 2, fx, fy);
    double want = 0.0;
    for (int k = 1; k <= s.plan.ris_on_count; ++k) {
      const CMat w = oracle::mixing(s.plan, k);
      for (int m = 0; m < 2; ++m) {
        cdouble acc{0.0, 0.0};
        for (int c = 0; c < 4; ++c) acc += std::conj(a[c]) * std::conj(w(m, c));
        want += std::norm(acc);
      }
    }
    CHECK(cache.gamma[n] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("window_dft equals the direct centred DFT") {
  Rng rng(55);
  CMat block(2, 13);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 13; ++c) {
      block(r, c) = cdouble{rng.normal(), rng.normal()};
    }
  }
  for (int nfft : {8, 13, 16, 32}) {
    const CMat got = detail::window_dft(block, nfft);
    for (int r = 0; r < 2; ++r) {
      for (int b = 0; b < nfft; ++b) {
        cdouble want{0.0, 0.0};
        for (int i = 0; i < 13; ++i) {
          const int n = window_start(13) + i;
          want += block(r, i) * std::exp(-kJ * (kTwoPi * b * n / nfft));
        }
        CHECK(std::abs(got(r, b) - want) < 1e-10 * (1.0 + std::abs(want)));
      }
    }
  }
}

TEST_CASE("RIS objective pipeline equals brute force on every grid point") {
  const oracle::SmallSetup s = oracle::small_setup(34, 3, 0, 4, 4, 2);
  GridSpec grid = small_grid();
  grid.n_zeta = 32;
  grid.n_xi = 8;
  Rng rng(77);
  CMat ytilde(s.plan.stacked_rows(), s.pilot.window);
  for (int r = 0; r < ytilde.rows(); ++r) {
    for (int c = 0; c < ytilde.cols(); ++c) {
      ytilde(r, c) = cdouble{rng.normal(), rng.normal()};
    }
  }
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  const RVec pipeline = ris_objective_grid(ytilde, s.plan, grid, cache);
  const RVec brute = oracle::ris_grid_brute(ytilde, s.plan, grid);
  REQUIRE(pipeline.size() == brute.size());
  const double scale = brute.maxCoeff();
  for (long long i = 0; i < pipeline.size(); ++i) {
    CHECK(std::abs(pipeline[i] - brute[i]) < 1e-9 * scale);
  }

  // the scanned argmax agrees with the exhaustive scan of the same tensor
  const CoarseEstimate est = coarse_ris(ytilde, s.plan, grid, cache);
  long long best = 0;
  for (long long i = 1; i < pipeline.size(); ++i) {
    if (pipeline[i] > pipeline[best]) best = i;
  }
  CHECK(est.objective == doctest::Approx(pipeline[best]).epsilon(1e-12));
}

TEST_CASE("direct objective pipeline equals brute force") {
  const oracle::SmallSetup s = oracle::small_setup(35, 2, 3, 2, 2, 3);
  GridSpec grid = small_grid();
  grid.n_zeta_bar = 32;
  grid.n_xi_bar = 8;
  Rng rng(78);
  CMat ytilde(s.plan.ris_off_count * s.geom.bs_antennas, s.pilot.window);
  for (int r = 0; r < ytilde.rows(); ++r) {
    for (int c = 0; c < ytilde.cols(); ++c) {
      ytilde(r, c) = cdouble{rng.normal(), rng.normal()};
    }
  }
  const RVec pipeline = direct_objective_grid(ytilde, s.plan, grid);
  const RVec brute = oracle::direct_grid_brute(ytilde, s.plan, grid);
  REQUIRE(pipeline.size() == brute.size());
  const double scale = brute.maxCoeff();
  for (long long i = 0; i < pipeline.size(); ++i) {
    CHECK(std::abs(pipeline[i] - brute[i]) < 1e-9 * scale);
  }
  const CoarseEstimate est = coarse_direct(ytilde, s.plan, grid);
  long long best = 0;
  for (long long i = 1; i < pipeline.size(); ++i) {
    if (pipeline[i] > pipeline[best]) best = i;
  }
  CHECK(est.objective == doctest::Approx(pipeline[best]).epsilon(1e-12));
}

TEST_CASE("noiseless on-grid single path is recovered exactly") {
  const oracle::SmallSetup s = oracle::small_setup(36, 3, 0);
  const GridSpec grid = small_grid();
  const OnGrid og = on_grid_scene(s, grid);
  const CMat y = simulate_noiseless(og.scene, s.plan, s.pilot);
  const CMat ytilde = compensate(y, s.pilot);
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  const CoarseEstimate est = coarse_ris(ytilde, s.plan, grid, cache);
  CHECK(est.zeta == doctest::Approx(og.zeta).epsilon(1e-12));
  CHECK(est.xi == doctest::Approx(og.xi).epsilon(1e-12));
  CHECK(est.theta == doctest::Approx(og.theta).epsilon(1e-9));
  CHECK(est.phi == doctest::Approx(og.phi).epsilon(1e-9));
  CHECK_FALSE(est.clamped);
}

TEST_CASE("zero data returns the first grid point with zero objective") {
  const oracle::SmallSetup s = oracle::small_setup(37, 2, 0, 2, 2, 2);
  GridSpec grid = small_grid();
  grid.n_zeta = 16;
  grid.n_xi = 4;
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  const CMat ytilde = CMat::Zero(s.plan.stacked_rows(), s.pilot.window);
  const CoarseEstimate est = coarse_ris(ytilde, s.plan, grid, cache);
  CHECK(est.objective == 0.0);
  CHECK(est.zeta == 0.0);
  CHECK(est.xi == 0.0);
  // first spatial grid point: f_x = f_y = 0 -> phi = theta = pi/2
  CHECK(est.phi == doctest::Approx(kPi / 2));
  CHECK(est.theta == doctest::Approx(kPi / 2));
}

TEST_CASE("noiseless on-grid direct path is recovered exactly") {
  const oracle::SmallSetup s = oracle::small_setup(38, 2, 4, 2, 2, 4);
  const GridSpec grid = small_grid();
  const int bin_t = 3, bin_z = 62, bin_x = 2;
  const double fbar = static_cast<double>(bin_t) / grid.n_theta_bar;
  const double theta = std::acos(-s.geom.wavelength * fbar / s.geom.bs_spacing);
  const double zeta = static_cast<double>(bin_z) / grid.n_zeta_bar - 1.0;
  const double xi = static_cast<double>(bin_x) / grid.n_xi_bar / s.plan.symbol_length;
  Scene scene;
  const double tau = (xi - zeta) * s.pilot.zc_length;
  REQUIRE(std::abs(tau) <= s.pilot.max_delay);
  scene.direct_paths.push_back({tau, xi, theta, cdouble{1.0, -0.3}});
  const CMat y = simulate_noiseless(scene, s.plan, s.pilot, PilotModel::ideal, false, 0.0);
  const CMat ytilde = compensate(y, s.pilot);
  const CoarseEstimate est = coarse_direct(ytilde, s.plan, grid);
  CHECK(est.zeta == doctest::Approx(zeta).epsilon(1e-12));
  CHECK(est.xi == doctest::Approx(xi).epsilon(1e-12));
  CHECK(est.theta == doctest::Approx(theta).epsilon(1e-9));
  CHECK(est.xi_identifiable);
}

TEST_CASE("broadside direct path peaks in spatial bin zero") {
  const oracle::SmallSetup s = oracle::small_setup(39, 2, 2, 2, 2, 4);
  const GridSpec grid = small_grid();
  Scene scene;
  scene.direct_paths.push_back({0.0, 0.0, kPi / 2, cdouble{1.0, 0.0}});
  const CMat ytilde = compensate(
      simulate_noiseless(scene, s.plan, s.pilot, PilotModel::ideal, false, 0.0), s.pilot);
  const CoarseEstimate est = coarse_direct(ytilde, s.plan, grid);
  CHECK(est.theta == doctest::Approx(kPi / 2).epsilon(1e-9));
}

TEST_CASE("single RIS-off observation cannot identify xi") {
  const oracle::SmallSetup s = oracle::small_setup(40, 2, 1, 2, 2, 3);
  const GridSpec grid = small_grid();
  Scene scene;
  scene.direct_paths.push_back({1.0, 0.0, 1.2, cdouble{1.0, 0.0}});
  const CMat ytilde = compensate(
      simulate_noiseless(scene, s.plan, s.pilot, PilotModel::ideal, false, 0.0), s.pilot);
  const CoarseEstimate est = coarse_direct(ytilde, s.plan, grid);
  CHECK_FALSE(est.xi_identifiable);
  CHECK(est.xi == 0.0);
}

TEST_CASE("grid and cache mismatches are rejected") {
  const oracle::SmallSetup s = oracle::small_setup(41, 2, 0, 2, 2, 2);
  GridSpec grid = small_grid();
  const DenominatorCache cache = precompute_denominator(s.plan, grid);
  const CMat ytilde = CMat::Zero(s.plan.stacked_rows() + 1, s.pilot.window);
  CHECK_THROWS_AS((void)coarse_ris(ytilde, s.plan, grid, cache), std::invalid_argument);
  GridSpec other = grid;
  other.n_phi = 4;
  const CMat ok = CMat::Zero(s.plan.stacked_rows(), s.pilot.window);
  CHECK_THROWS_AS((void)coarse_ris(ok, s.plan, other, cache), std::invalid_argument);
  GridSpec bad;
  bad.n_theta = 1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
