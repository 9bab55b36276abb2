#include "rischan/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rischan/rng.hpp"

namespace rischan {

namespace {

using nlohmann::json;

constexpr double kSpeedOfLight = 299792458.0;  // m/s

double deg2rad(double deg) { return deg * kPi / 180.0; }

double parse_snr(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "INF") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("config: snr_db entries must be numbers or \"inf\"");
  }
  return v.get<double>();
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ArrayGeometry GeometrySpec::build() const {
  ArrayGeometry geom;
  geom.ris_rows = ris_rows;
  geom.ris_cols = ris_cols;
  geom.bs_antennas = bs_antennas;
  geom.wavelength = kSpeedOfLight / (carrier_ghz * 1e9);
  geom.spacing_x = spacing_x_wl * geom.wavelength;
  geom.spacing_z = spacing_z_wl * geom.wavelength;
  geom.bs_spacing = bs_spacing_wl * geom.wavelength;
  return geom;
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig cfg;
  read_if(j, "seed", cfg.seed);
  read_if(j, "trials", cfg.trials);
  read_if(j, "threads", cfg.threads);
  read_if(j, "outputs", cfg.outputs);
  read_if(j, "crb", cfg.crb);
  read_if(j, "dump_blocks", cfg.dump_blocks);
  if (j.contains("snr_db")) {
    cfg.snr_db.clear();
    for (const auto& v : j.at("snr_db")) cfg.snr_db.push_back(parse_snr(v));
  }
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m == "ris") {
      cfg.mode = ExperimentMode::ris;
    } else if (m == "two_stage") {
      cfg.mode = ExperimentMode::two_stage;
    } else {
      throw std::invalid_argument("config: mode must be \"ris\" or \"two_stage\"");
    }
  }
  if (j.contains("pilot_model")) {
    const std::string m = j.at("pilot_model").get<std::string>();
    if (m == "ideal") {
      cfg.pilot_model = PilotModel::ideal;
    } else if (m == "shaped") {
      cfg.pilot_model = PilotModel::shaped;
    } else {
      throw std::invalid_argument("config: pilot_model must be \"ideal\" or \"shaped\"");
    }
  }
  read_if(j, "projection_offsets", cfg.projection_offsets);

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    read_if(g, "ris_rows", cfg.geometry.ris_rows);
    read_if(g, "ris_cols", cfg.geometry.ris_cols);
    read_if(g, "bs_antennas", cfg.geometry.bs_antennas);
    read_if(g, "carrier_ghz", cfg.geometry.carrier_ghz);
    read_if(g, "spacing_x_wl", cfg.geometry.spacing_x_wl);
    read_if(g, "spacing_z_wl", cfg.geometry.spacing_z_wl);
    read_if(g, "bs_spacing_wl", cfg.geometry.bs_spacing_wl);
  }
  if (j.contains("pilot")) {
    const json& p = j.at("pilot");
    read_if(p, "zc_length", cfg.pilot.zc_length);
    read_if(p, "root", cfg.pilot.root);
    read_if(p, "cp_length", cfg.pilot.cp_length);
    read_if(p, "window", cfg.pilot.window);
    read_if(p, "rolloff", cfg.pilot.rolloff);
    read_if(p, "oversample", cfg.pilot.oversample);
    read_if(p, "max_delay", cfg.pilot.max_delay);
    read_if(p, "advance", cfg.pilot.advance);
  }
  if (j.contains("plan")) {
    const json& p = j.at("plan");
    read_if(p, "ris_on_count", cfg.plan.ris_on_count);
    read_if(p, "ris_off_count", cfg.plan.ris_off_count);
    read_if(p, "efficiency", cfg.plan.efficiency);
    read_if(p, "phase_bits", cfg.plan.phase_bits);
    read_if(p, "g_seed", cfg.plan.g_seed);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    read_if(g, "n_theta", cfg.grid.n_theta);
    read_if(g, "n_phi", cfg.grid.n_phi);
    read_if(g, "n_zeta", cfg.grid.n_zeta);
    read_if(g, "n_xi", cfg.grid.n_xi);
    read_if(g, "n_theta_bar", cfg.grid.n_theta_bar);
    read_if(g, "n_zeta_bar", cfg.grid.n_zeta_bar);
    read_if(g, "n_xi_bar", cfg.grid.n_xi_bar);
  }
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    if (s.contains("ris_paths")) {
      for (const auto& v : s.at("ris_paths")) {
        RisPathSpec p;
        read_if(v, "delay", p.delay);
        read_if(v, "doppler", p.doppler);
        read_if(v, "azimuth_deg", p.azimuth_deg);
        read_if(v, "elevation_deg", p.elevation_deg);
        read_if(v, "gain", p.gain);
        if (v.contains("gain_phase_deg") && !v.at("gain_phase_deg").is_null()) {
          p.gain_phase_deg = v.at("gain_phase_deg").get<double>();
        }
        cfg.ris_paths.push_back(p);
      }
    }
    if (s.contains("direct_paths")) {
      for (const auto& v : s.at("direct_paths")) {
        DirectPathSpec p;
        read_if(v, "delay", p.delay);
        read_if(v, "doppler", p.doppler);
        read_if(v, "azimuth_deg", p.azimuth_deg);
        read_if(v, "gain", p.gain);
        if (v.contains("gain_phase_deg") && !v.at("gain_phase_deg").is_null()) {
          p.gain_phase_deg = v.at("gain_phase_deg").get<double>();
        }
        cfg.direct_paths.push_back(p);
      }
    }
  }
  if (j.contains("sage")) {
    const json& s = j.at("sage");
    read_if(s, "max_cycles", cfg.sage.max_cycles);
    read_if(s, "rel_tol", cfg.sage.rel_tol);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  auto check = [&errors](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  check(cfg.trials >= 1, "trials: must be >= 1");
  check(!cfg.snr_db.empty(), "snr_db: must list at least one SNR point");
  check(cfg.threads >= 1, "threads: must be >= 1");
  for (int off : cfg.projection_offsets) {
    check(off >= 0, "projection_offsets: offsets must be >= 0");
  }

  try {
    validate(cfg.geometry.build());
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  try {
    validate(cfg.pilot);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  try {
    validate(cfg.grid);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }

  check(cfg.plan.ris_on_count >= 1, "plan.ris_on_count: must be >= 1");
  check(cfg.plan.ris_off_count >= 0, "plan.ris_off_count: must be >= 0");
  check(cfg.plan.efficiency > 0.0 && cfg.plan.efficiency <= 1.0,
        "plan.efficiency: must lie in (0, 1]");
  check(cfg.plan.phase_bits >= 1 && cfg.plan.phase_bits <= 16,
        "plan.phase_bits: must lie in [1, 16]");

  if (cfg.mode == ExperimentMode::ris) {
    check(!cfg.ris_paths.empty(), "scene.ris_paths: mode \"ris\" needs at least one RIS path");
    check(cfg.direct_paths.empty(),
          "scene.direct_paths: mode \"ris\" has no direct link; use mode \"two_stage\"");
  } else {
    check(cfg.plan.ris_off_count >= 1,
          "plan.ris_off_count: two-stage estimation needs RIS-off observations");
    check(!cfg.direct_paths.empty(),
          "scene.direct_paths: mode \"two_stage\" needs at least one direct path");
  }
  if (cfg.crb) {
    check(cfg.direct_paths.empty(), "crb: bounds cover the RIS-only model; remove direct paths");
    check(!cfg.ris_paths.empty(), "crb: bounds need at least one RIS path");
  }

  const int n_symbol = cfg.pilot.symbol_length();
  auto check_path = [&](double delay, double doppler, double az, double el, double gain,
                        const std::string& name) {
    check(std::abs(delay) <= cfg.pilot.max_delay, name + ".delay: |delay| exceeds max_delay");
    check(std::abs(doppler) * n_symbol < 0.5,
          name + ".doppler: |doppler|*N must be < 0.5 (aliases across observations)");
    check(az > 0.0 && az < 180.0, name + ".azimuth_deg: must lie in (0, 180)");
    check(el > 0.0 && el < 180.0, name + ".elevation_deg: must lie in (0, 180)");
    check(gain > 0.0, name + ".gain: must be > 0");
  };
  for (std::size_t i = 0; i < cfg.ris_paths.size(); ++i) {
    const auto& p = cfg.ris_paths[i];
    check_path(p.delay, p.doppler, p.azimuth_deg, p.elevation_deg, p.gain,
               "scene.ris_paths[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < cfg.direct_paths.size(); ++i) {
    const auto& p = cfg.direct_paths[i];
    check_path(p.delay, p.doppler, p.azimuth_deg, 90.0, p.gain,
               "scene.direct_paths[" + std::to_string(i) + "]");
  }

  check(cfg.sage.max_cycles >= 1, "sage.max_cycles: must be >= 1");
  check(cfg.sage.rel_tol > 0.0, "sage.rel_tol: must be > 0");
  return errors;
}

Scene make_scene(const ExperimentConfig& cfg, Rng& rng) {
  Scene scene;
  for (const auto& spec : cfg.ris_paths) {
    RisPath p;
    p.delay = spec.delay;
    p.doppler = spec.doppler;
    p.azimuth = deg2rad(spec.azimuth_deg);
    p.elevation = deg2rad(spec.elevation_deg);
    const double ph =
        spec.gain_phase_deg ? deg2rad(*spec.gain_phase_deg) : rng.uniform(0.0, kTwoPi);
    p.gain = spec.gain * std::exp(kJ * ph);
    scene.ris_paths.push_back(p);
  }
  for (const auto& spec : cfg.direct_paths) {
    DirectPath p;
    p.delay = spec.delay;
    p.doppler = spec.doppler;
    p.azimuth = deg2rad(spec.azimuth_deg);
    const double ph =
        spec.gain_phase_deg ? deg2rad(*spec.gain_phase_deg) : rng.uniform(0.0, kTwoPi);
    p.gain = spec.gain * std::exp(kJ * ph);
    scene.direct_paths.push_back(p);
  }
  return scene;
}

ObservationPlan make_plan(const ExperimentConfig& cfg, Rng& rng) {
  ObservationPlan plan;
  plan.geom = cfg.geometry.build();
  plan.ris_on_count = cfg.plan.ris_on_count;
  plan.ris_off_count = cfg.plan.ris_off_count;
  plan.symbol_length = cfg.pilot.symbol_length();
  plan.efficiency = cfg.plan.efficiency;
  plan.g = make_los_channel(plan.geom, cfg.plan.g_seed);
  plan.phases = random_phase_schedule(plan.ris_on_count, plan.geom.ris_elements(),
                                      cfg.plan.phase_bits, rng);
  return plan;
}

}  // namespace rischan
