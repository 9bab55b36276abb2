#ifndef RISCHAN_RECON_HPP
#define RISCHAN_RECON_HPP

#include "rischan/pilot.hpp"
#include "rischan/sage.hpp"
#include "rischan/scene.hpp"

namespace rischan {

enum class Domain { time, frequency };

// Sampled channel response, one row per RIS element (UE-to-RIS) or per BS
// antenna (UE-to-BS), L~ tap/subcarrier columns.
struct ChannelResponse {
  CMat taps;
  Domain domain = Domain::time;
  double t_ref = 0.0;  // projection time offset in samples
};

// Parametric time-domain channel at time t: path gains rotate by
// exp(j 2 pi xi t) and the raised-cosine pulse is sampled at n - tau,
// n = 0 .. L~-1.
ChannelResponse ris_channel(const std::vector<RisPath>& paths, const ArrayGeometry& geom,
                            const ZcPilot& pilot, double t);
ChannelResponse direct_channel(const std::vector<DirectPath>& paths, const ArrayGeometry& geom,
                               const ZcPilot& pilot, double t, double advance = 0.0);

// Estimated channels; the direct reconstruction advances every Doppler phase
// by the K_bar RIS-off symbols, exactly as the two-stage estimates reference
// their gains.
ChannelResponse reconstruct_ris(const EstimateReport& report, const ArrayGeometry& geom,
                                const ZcPilot& pilot, double t);
ChannelResponse reconstruct_direct(const EstimateReport& report, const ArrayGeometry& geom,
                                   const ZcPilot& pilot, double t, int kbar);

// Row-wise unitary DFT and its inverse; round trips to machine precision.
ChannelResponse to_frequency(const ChannelResponse& resp);
ChannelResponse to_time(const ChannelResponse& resp);

// sqrt(||est - truth||_F^2 / (rows * cols)); both responses must share shape
// and domain.
double rmse(const ChannelResponse& est, const ChannelResponse& truth);

std::vector<RisPath> to_ris_paths(const EstimateReport& report);
std::vector<DirectPath> to_direct_paths(const EstimateReport& report, double advance_samples);

// Frequency-domain channel RMSE between two parametric path sets evaluated at
// their own times, computed through Gram inner products instead of
// materializing the M x L~ responses (identical by Parseval; unit tested
// against the materialized route).
double ris_channel_rmse(const std::vector<RisPath>& est, double t_est,
                        const std::vector<RisPath>& truth, double t_truth,
                        const ArrayGeometry& geom, const ZcPilot& pilot);
double direct_channel_rmse(const std::vector<DirectPath>& est, double t_est,
                           const std::vector<DirectPath>& truth, double t_truth,
                           const ArrayGeometry& geom, const ZcPilot& pilot);

// RMS entry magnitude of the parametric channel, same normalization as rmse.
double ris_channel_rms(const std::vector<RisPath>& paths, const ArrayGeometry& geom,
                       const ZcPilot& pilot, double t);
double direct_channel_rms(const std::vector<DirectPath>& paths, const ArrayGeometry& geom,
                          const ZcPilot& pilot, double t);

}  // namespace rischan

#endif  // RISCHAN_RECON_HPP
