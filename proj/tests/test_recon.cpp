#include <doctest.h>

#include "rischan/pulse.hpp"
#include "rischan/recon.hpp"
#include "rischan/rng.hpp"
#include "support/oracles.hpp"

using namespace rischan;

TEST_CASE("raised cosine pulse: Nyquist zeros and the singular point") {
  for (double mu : {0.0, 0.1, 0.3, 0.5, 1.0}) {
    CHECK(raised_cosine(0.0, mu) == 1.0);
    for (int k = 1; k <= 20; ++k) {
      CHECK(std::abs(raised_cosine(static_cast<double>(k), mu)) < 1e-14);
      CHECK(std::abs(raised_cosine(static_cast<double>(-k), mu)) < 1e-14);
    }
  }
  // removable singularity at tau = 1/(2 mu)
  const double mu = 0.3;
  const double ts = 1.0 / (2.0 * mu);
  const double want = kPi / 4.0 * sinc_pi(ts);
  CHECK(raised_cosine(ts, mu) == doctest::Approx(want).epsilon(1e-9));
  CHECK(raised_cosine(-ts, mu) == doctest::Approx(want).epsilon(1e-9));
  // continuity just off the singular point
  CHECK(raised_cosine(ts + 1e-7, mu) == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("pulse taps match the scalar formula at fractional delay") {
  const double mu = 0.3, tau = 0.5;
  for (int n = 0; n < 12; ++n) {
    const double t = n - tau;
    const double direct =
        sinc_pi(t) * std::cos(kPi * mu * t) / (1.0 - (2.0 * mu * t) * (2.0 * mu * t));
    CHECK(raised_cosine(t, mu) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("single path at integer delay occupies exactly one tap column") {
  const oracle::SmallSetup s = oracle::small_setup(91);
  std::vector<RisPath> paths{{0.0, 0.0, 1.2, 0.9, cdouble{0.7, -0.1}}};
  const ChannelResponse h = ris_channel(paths, s.geom, s.pilot, 0.0);
  REQUIRE(h.taps.rows() == s.geom.ris_elements());
  REQUIRE(h.taps.cols() == s.pilot.zc_length);
  const CVec a = ris_response(s.geom, {1.2, 0.9});
  CHECK((h.taps.col(0) - paths[0].gain * a).norm() < 1e-12);
  for (int n = 1; n < s.pilot.zc_length; ++n) {
    CHECK(h.taps.col(n).norm() < 1e-12);
  }
}

TEST_CASE("projection rotates every entry by exp(j 2 pi xi T)") {
  const oracle::SmallSetup s = oracle::small_setup(92);
  std::vector<RisPath> paths{{0.5, 2e-4, 1.2, 0.9, cdouble{0.7, -0.1}}};
  const double T = 1234.0;
  const ChannelResponse h0 = ris_channel(paths, s.geom, s.pilot, 0.0);
  const ChannelResponse hT = ris_channel(paths, s.geom, s.pilot, T);
  const cdouble rot = std::exp(kJ * (kTwoPi * 2e-4 * T));
  CHECK((hT.taps - rot * h0.taps).norm() < 1e-10 * h0.taps.norm());
}

TEST_CASE("to_frequency basics and round trip") {
  const oracle::SmallSetup s = oracle::small_setup(93);
  SUBCASE("impulse tap gives a flat spectrum") {
    std::vector<DirectPath> paths{{0.0, 0.0, 1.4, cdouble{1.0, 0.0}}};
    const ChannelResponse h = direct_channel(paths, s.geom, s.pilot, 0.0);
    const ChannelResponse f = to_frequency(h);
    const double want = 1.0 / std::sqrt(static_cast<double>(s.pilot.zc_length));
    for (int c = 0; c < f.taps.cols(); ++c) {
      CHECK(std::abs(std::abs(f.taps(0, c) / f.taps(0, 0)) - 1.0) < 1e-10);
    }
    CHECK(std::abs(std::abs(f.taps(0, 0)) - want) < 1e-12);
  }
  SUBCASE("integer delayed tap gives a linear phase ramp") {
    std::vector<DirectPath> paths{{3.0, 0.0, 1.4, cdouble{1.0, 0.0}}};
    const ChannelResponse f =
        to_frequency(direct_channel(paths, s.geom, s.pilot, 0.0));
    const int n = s.pilot.zc_length;
    for (int c = 1; c < n; ++c) {
      const cdouble ratio = f.taps(0, c) / f.taps(0, 0);
      const cdouble want = std::exp(-kJ * (kTwoPi * 3.0 * c / n));
      CHECK(std::abs(ratio - want) < 1e-9);
    }
  }
  SUBCASE("random taps round trip") {
    Rng rng(31);
    ChannelResponse h;
    h.taps.resize(3, 64);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 64; ++c) h.taps(r, c) = cdouble{rng.normal(), rng.normal()};
    }
    const ChannelResponse back = to_time(to_frequency(h));
    CHECK((back.taps - h.taps).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("rmse basics and the scalar accumulation oracle") {
  ChannelResponse a, b;
  a.taps = CMat::Random(4, 16);
  b.taps = a.taps;
  CHECK(rmse(a, b) == 0.0);
  b.taps.array() += cdouble{0.25, 0.0};
  CHECK(rmse(a, b) == doctest::Approx(0.25).epsilon(1e-12));

  Rng rng(33);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 16; ++c) {
      a.taps(r, c) = cdouble{rng.normal(), rng.normal()};
      b.taps(r, c) = cdouble{rng.normal(), rng.normal()};
    }
  }
  double acc = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 16; ++c) acc += std::norm(a.taps(r, c) - b.taps(r, c));
  }
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(acc / 64.0)).epsilon(1e-12));

  ChannelResponse wrong;
  wrong.taps = CMat::Zero(4, 8);
  CHECK_THROWS_AS((void)rmse(a, wrong), std::invalid_argument);
  ChannelResponse freq = to_frequency(a);
  CHECK_THROWS_AS((void)rmse(a, freq), std::invalid_argument);
}

TEST_CASE("Parseval: time and frequency RMSE agree under the unitary DFT") {
  const oracle::SmallSetup s = oracle::small_setup(94);
  std::vector<RisPath> pa{{0.7, 1e-4, 1.2, 0.8, cdouble{1.0, 0.0}},
                          {2.2, -2e-4, 1.9, 1.5, cdouble{0.4, 0.4}}};
  std::vector<RisPath> pb = pa;
  pb[0].delay += 0.05;
  pb[1].gain *= cdouble{0.9, 0.05};
  const ChannelResponse ha = ris_channel(pa, s.geom, s.pilot, 0.0);
  const ChannelResponse hb = ris_channel(pb, s.geom, s.pilot, 0.0);
  const double t_rmse = rmse(ha, hb);
  const double f_rmse = rmse(to_frequency(ha), to_frequency(hb));
  CHECK(std::abs(t_rmse - f_rmse) < 1e-10 * t_rmse + 1e-14);
}

TEST_CASE("Gram-based channel RMSE equals the materialized route") {
  const oracle::SmallSetup s = oracle::small_setup(95);
  std::vector<RisPath> truth{{0.7, 1e-4, 1.2, 0.8, cdouble{1.0, 0.0}},
                             {2.2, -2e-4, 1.9, 1.5, cdouble{0.4, 0.4}}};
  std::vector<RisPath> est = truth;
  est[0].delay += 0.03;
  est[0].doppler += 1e-5;
  est[1].azimuth -= 0.02;
  est[1].gain *= cdouble{0.95, 0.1};
  const double t_est = 512.0, t_truth = 800.0;
  const double fast = ris_channel_rmse(est, t_est, truth, t_truth, s.geom, s.pilot);
  const ChannelResponse he = to_frequency(ris_channel(est, s.geom, s.pilot, t_est));
  const ChannelResponse ht = to_frequency(ris_channel(truth, s.geom, s.pilot, t_truth));
  CHECK(fast == doctest::Approx(rmse(he, ht)).epsilon(1e-9));

  std::vector<DirectPath> dtruth{{0.4, 1e-4, 1.4, cdouble{0.8, 0.1}}};
  std::vector<DirectPath> dest{{0.45, 1.2e-4, 1.41, cdouble{0.78, 0.12}}};
  const double dfast = direct_channel_rmse(dest, t_est, dtruth, t_truth, s.geom, s.pilot);
  const ChannelResponse de = to_frequency(direct_channel(dest, s.geom, s.pilot, t_est));
  const ChannelResponse dt = to_frequency(direct_channel(dtruth, s.geom, s.pilot, t_truth));
  CHECK(dfast == doctest::Approx(rmse(de, dt)).epsilon(1e-9));

  const double rms = ris_channel_rms(truth, s.geom, s.pilot, 0.0);
  ChannelResponse zero;
  zero.taps = CMat::Zero(s.geom.ris_elements(), s.pilot.zc_length);
  CHECK(rms == doctest::Approx(rmse(ris_channel(truth, s.geom, s.pilot, 0.0), zero))
                   .epsilon(1e-10));
}

TEST_CASE("projection consistency: exact estimates project exactly") {
  const oracle::SmallSetup s = oracle::small_setup(96);
  std::vector<RisPath> truth{{0.7, 1e-4, 1.2, 0.8, cdouble{1.0, 0.0}},
                             {2.2, -2e-4, 1.9, 1.5, cdouble{0.4, 0.4}}};
  // the Gram route cancels large equal terms, so its zero has a sqrt(eps)
  // floor relative to the channel RMS
  const double floor = 1e-7 * ris_channel_rms(truth, s.geom, s.pilot, 0.0);
  for (double T : {0.0, 800.0, 3200.0}) {
    CHECK(ris_channel_rmse(truth, T, truth, T, s.geom, s.pilot) < floor);
  }
}

TEST_CASE("reconstruct_direct applies the stage advance") {
  const oracle::SmallSetup s = oracle::small_setup(97, 2, 3, 2, 2, 3);
  EstimateReport rep;
  DirectPathEstimate p;
  p.zeta = -0.001;
  p.xi = 1.5e-4;
  p.theta = 1.3;
  p.tau = (p.xi - p.zeta) * s.pilot.zc_length;
  p.alpha = cdouble{0.6, 0.2};
  rep.direct_paths.push_back(p);
  const int kbar = 3;
  const ChannelResponse h0 = reconstruct_direct(rep, s.geom, s.pilot, 0.0, kbar);
  const ChannelResponse none = reconstruct_direct(rep, s.geom, s.pilot, 0.0, 0);
  const cdouble rot =
      std::exp(kJ * (kTwoPi * p.xi * kbar * static_cast<double>(s.plan.symbol_length)));
  CHECK((h0.taps - rot * none.taps).norm() < 1e-10 * none.taps.norm());
  EstimateReport empty;
  CHECK_THROWS_AS((void)reconstruct_ris(empty, s.geom, s.pilot, 0.0), std::invalid_argument);
}
