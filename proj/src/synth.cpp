#include "rischan/synth.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "rischan/rng.hpp"

namespace rischan {

namespace {

// Pilot row x(tau + g) (+g: the receive window is advanced by g samples, so
// every path appears delayed by the sampling advance).
CVec pilot_row(const ZcPilot& pilot, PilotModel model, double tau,
               std::optional<ShapedPilot>& wave) {
  const double eff_tau = tau + pilot.advance;
  if (model == PilotModel::ideal) {
    return chirp_vector(pilot.window, pilot.zc_length, eff_tau);
  }
  if (!wave) wave = shaped_pilot(pilot);
  return sample_shaped(*wave, pilot, eff_tau);
}

}  // namespace

CMat simulate_noiseless(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
                        PilotModel model, bool ris_on, double time_offset) {
  validate(plan);
  validate(pilot);
  validate(scene, pilot.max_delay, plan.symbol_length);
  if (plan.symbol_length != pilot.symbol_length()) {
    throw std::invalid_argument("synth: plan.symbol_length must equal pilot zc_length + cp_length");
  }
  const int Mr = plan.geom.bs_antennas;
  const int blocks = ris_on ? plan.ris_on_count : plan.ris_off_count;
  if (blocks < 1) {
    throw std::invalid_argument("synth: requested stage has no observations");
  }
  const int L = pilot.window;
  const int N = plan.symbol_length;
  CMat y = CMat::Zero(blocks * Mr, L);
  std::optional<ShapedPilot> wave;

  if (ris_on) {
    for (const auto& path : scene.ris_paths) {
      const CVec a = ris_response(plan.geom, {path.azimuth, path.elevation});
      const CVec row =
          pilot_row(pilot, model, path.delay, wave).cwiseProduct(doppler_vector(L, path.doppler));
      const cdouble gain = path.gain * std::exp(kJ * (kTwoPi * path.doppler * time_offset));
      for (int k = 0; k < blocks; ++k) {
        const cdouble ph = std::exp(kJ * (kTwoPi * path.doppler * k * N));
        y.middleRows(k * Mr, Mr).noalias() +=
            (gain * ph) * (mixing_matrix(plan, k + 1) * a) * row.transpose();
      }
    }
  }
  for (const auto& path : scene.direct_paths) {
    const CVec c = bs_response(plan.geom, path.azimuth);
    const CVec row =
        pilot_row(pilot, model, path.delay, wave).cwiseProduct(doppler_vector(L, path.doppler));
    const cdouble gain = path.gain * std::exp(kJ * (kTwoPi * path.doppler * time_offset));
    for (int k = 0; k < blocks; ++k) {
      const cdouble ph = std::exp(kJ * (kTwoPi * path.doppler * k * N));
      y.middleRows(k * Mr, Mr).noalias() += (gain * ph) * c * row.transpose();
    }
  }
  return y;
}

void add_noise(CMat& y, double sigma2, Rng& rng) {
  for (int j = 0; j < y.cols(); ++j) {
    for (int i = 0; i < y.rows(); ++i) {
      y(i, j) += rng.cnormal(sigma2);
    }
  }
}

double signal_power(const CMat& y) {
  return y.squaredNorm() / static_cast<double>(y.size());
}

ReceivedBlock simulate(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
                       double snr_db, std::uint64_t seed, PilotModel model, bool ris_on,
                       double time_offset) {
  ReceivedBlock block;
  block.y = simulate_noiseless(scene, plan, pilot, model, ris_on, time_offset);
  block.snr_db = snr_db;
  if (std::isfinite(snr_db)) {
    block.sigma2 = signal_power(block.y) * std::pow(10.0, -snr_db / 10.0);
    Rng rng(stream_seed(seed, 0x4e4f495aULL, ris_on ? 1 : 0));
    add_noise(block.y, block.sigma2, rng);
  }
  return block;
}

}  // namespace rischan
