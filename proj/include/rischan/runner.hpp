#ifndef RISCHAN_RUNNER_HPP
#define RISCHAN_RUNNER_HPP

#include <string>
#include <vector>

#include "rischan/config.hpp"
#include "rischan/crb.hpp"
#include "rischan/recon.hpp"

namespace rischan {

inline constexpr int kTrialMean = -1;
inline constexpr int kTrialMedian = -2;
inline constexpr int kNoOffset = -1;

struct ResultRow {
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
  int trial = 0;                  // >= 0, kTrialMean, or kTrialMedian
  int projection_offset = kNoOffset;  // OFDM symbols
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

// Everything one trial consumes: the realized scene/schedule and the received
// blocks. Exposed so the synth subcommand and the tests can replay a trial.
struct TrialData {
  Scene scene;
  ObservationPlan plan;
  CMat y_on;
  CMat y_off;  // empty unless two-stage
  double sigma2 = 0.0;
};

TrialData make_trial_data(const ExperimentConfig& config, int snr_index, int trial);

// Monte-Carlo experiment: per (SNR, trial) synthesize, estimate, reconstruct,
// project, and score. Deterministic for a fixed (config, seed) regardless of
// the thread count.
ResultTable run_experiment(const ExperimentConfig& config);

// Bounds only: per-trial sqrt CRBs on the realized schedules.
ResultTable run_crb_only(const ExperimentConfig& config);

void write_csv(const ResultTable& table, const std::string& path);
void write_metadata(const ExperimentConfig& config, const std::string& path);

// run_experiment + CSV/metadata under config.outputs (or `outdir` if given).
void run_and_write(const ExperimentConfig& config, const std::string& outdir = "");

// Nearest-truth assignment (exhaustive over permutations, n <= 8), used for
// per-path diagnostics; returns est index for each truth path.
std::vector<int> match_ris_paths(const std::vector<RisPath>& truth,
                                 const std::vector<RisPathEstimate>& est, int zc_length);
std::vector<int> match_direct_paths(const std::vector<DirectPath>& truth,
                                    const std::vector<DirectPathEstimate>& est, int zc_length);

}  // namespace rischan

#endif  // RISCHAN_RUNNER_HPP
