#ifndef RISCHAN_CONFIG_HPP
#define RISCHAN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "rischan/coarse.hpp"
#include "rischan/pilot.hpp"
#include "rischan/sage.hpp"
#include "rischan/scene.hpp"
#include "rischan/synth.hpp"

namespace rischan {

enum class ExperimentMode { ris, two_stage };

// Path specs carry angles in degrees and an optional gain phase; a missing
// phase is drawn uniformly per trial.
struct RisPathSpec {
  double delay = 0.0;
  double doppler = 0.0;
  double azimuth_deg = 90.0;
  double elevation_deg = 90.0;
  double gain = 1.0;
  std::optional<double> gain_phase_deg;
};

struct DirectPathSpec {
  double delay = 0.0;
  double doppler = 0.0;
  double azimuth_deg = 90.0;
  double gain = 1.0;
  std::optional<double> gain_phase_deg;
};

struct GeometrySpec {
  int ris_rows = 32;
  int ris_cols = 32;
  int bs_antennas = 6;
  double carrier_ghz = 28.0;
  double spacing_x_wl = 0.5;
  double spacing_z_wl = 0.5;
  double bs_spacing_wl = 0.5;

  ArrayGeometry build() const;
};

struct PlanSpec {
  int ris_on_count = 4;    // K
  int ris_off_count = 0;   // K_bar
  double efficiency = 0.5;
  int phase_bits = 2;
  std::uint64_t g_seed = 7;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  std::vector<double> snr_db{20.0};
  ExperimentMode mode = ExperimentMode::ris;
  bool crb = false;
  PilotModel pilot_model = PilotModel::ideal;
  std::vector<int> projection_offsets;  // OFDM symbols
  std::string outputs = "out";
  int threads = 1;
  GeometrySpec geometry;
  ZcPilot pilot;
  PlanSpec plan;
  GridSpec grid;
  std::vector<RisPathSpec> ris_paths;
  std::vector<DirectPathSpec> direct_paths;
  SageOptions sage;
  bool dump_blocks = false;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Aggregated invariant checks; returns every violation, does not throw.
std::vector<std::string> validate(const ExperimentConfig& config);

// Scene instance for one trial; unset gain phases are drawn from rng.
Scene make_scene(const ExperimentConfig& config, Rng& rng);

// Observation schedule for one trial; G is fixed by plan.g_seed, the RIS
// phase states are redrawn per trial.
ObservationPlan make_plan(const ExperimentConfig& config, Rng& rng);

}  // namespace rischan

#endif  // RISCHAN_CONFIG_HPP
