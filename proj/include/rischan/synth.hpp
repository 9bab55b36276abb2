#ifndef RISCHAN_SYNTH_HPP
#define RISCHAN_SYNTH_HPP

#include <limits>

#include "rischan/pilot.hpp"
#include "rischan/scene.hpp"
#include "rischan/types.hpp"

namespace rischan {

enum class PilotModel { ideal, shaped };

struct ReceivedBlock {
  CMat y;               // K*M_r x L (or K_bar*M_r x L with the RIS off)
  double sigma2 = 0.0;  // noise variance per complex sample
  double snr_db = std::numeric_limits<double>::infinity();
};

// Noiseless stacked block. With ris_on the K RIS-on observations are
// synthesized (RIS paths plus any direct paths); otherwise the K_bar RIS-off
// observations carry the direct paths only. time_offset shifts every path's
// Doppler phase reference, so a two-stage experiment can place its stages on
// one clock.
CMat simulate_noiseless(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
                        PilotModel model = PilotModel::ideal, bool ris_on = true,
                        double time_offset = 0.0);

void add_noise(CMat& y, double sigma2, Rng& rng);

// Mean noiseless signal power per complex sample; the SNR reference.
double signal_power(const CMat& y);

ReceivedBlock simulate(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
                       double snr_db, std::uint64_t seed, PilotModel model = PilotModel::ideal,
                       bool ris_on = true, double time_offset = 0.0);

}  // namespace rischan

#endif  // RISCHAN_SYNTH_HPP
