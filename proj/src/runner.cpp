#include "rischan/runner.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rischan/rng.hpp"
#include "rischan/synth.hpp"

namespace rischan {

namespace {

enum : std::uint64_t { kTagScene = 1, kTagPlan = 2, kTagNoise = 3 };

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

double last_training_sample(const ObservationPlan& plan, const ZcPilot& pilot) {
  return static_cast<double>(plan.ris_on_count - 1) * plan.symbol_length +
         pilot.window / 2.0 - 1.0;
}

template <typename TruthPath, typename EstPath>
std::vector<int> match_by_distance(const std::vector<TruthPath>& truth,
                                   const std::vector<EstPath>& est, int zc_length) {
  const int n = static_cast<int>(truth.size());
  if (static_cast<int>(est.size()) != n || n > 8) {
    throw std::invalid_argument("match: path counts must agree and be <= 8");
  }
  RMat cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = std::abs(truth[i].delay - est[j].tau) +
                 zc_length * std::abs(truth[i].doppler - est[j].xi) +
                 std::abs(truth[i].azimuth - est[j].theta);
      if constexpr (requires { truth[i].elevation; }) {
        d += std::abs(truth[i].elevation - est[j].phi);
      }
      cost(i, j) = d;
    }
  }
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct TrialResult {
  std::vector<ResultRow> rows;
};

void push(std::vector<ResultRow>& rows, double snr, const std::string& metric, double value,
          int trial, int offset = kNoOffset) {
  rows.push_back({snr, metric, value, trial, offset});
}

void parameter_metrics(std::vector<ResultRow>& rows, double snr, int trial,
                       const ExperimentConfig& cfg, const Scene& scene,
                       const EstimateReport& report) {
  if (scene.ris_paths.size() == report.ris_paths.size() && !scene.ris_paths.empty() &&
      scene.ris_paths.size() <= 8) {
    const std::vector<int> perm =
        match_by_distance(scene.ris_paths, report.ris_paths, cfg.pilot.zc_length);
    const bool single = scene.ris_paths.size() == 1;
    for (std::size_t u = 0; u < scene.ris_paths.size(); ++u) {
      const auto& t = scene.ris_paths[u];
      const auto& e = report.ris_paths[perm[u]];
      const std::string sfx = single ? "" : "_p" + std::to_string(u);
      push(rows, snr, "err_tau" + sfx, e.tau - t.delay, trial);
      push(rows, snr, "err_xi" + sfx, e.xi - t.doppler, trial);
      push(rows, snr, "err_theta" + sfx, e.theta - t.azimuth, trial);
      push(rows, snr, "err_phi" + sfx, e.phi - t.elevation, trial);
    }
  }
  if (scene.direct_paths.size() == report.direct_paths.size() && !scene.direct_paths.empty() &&
      scene.direct_paths.size() <= 8) {
    const std::vector<int> perm =
        match_by_distance(scene.direct_paths, report.direct_paths, cfg.pilot.zc_length);
    const bool single = scene.direct_paths.size() == 1;
    for (std::size_t d = 0; d < scene.direct_paths.size(); ++d) {
      const auto& t = scene.direct_paths[d];
      const auto& e = report.direct_paths[perm[d]];
      const std::string sfx = single ? "" : "_p" + std::to_string(d);
      push(rows, snr, "err_tau_bar" + sfx, e.tau - t.delay, trial);
      push(rows, snr, "err_xi_bar" + sfx, e.xi - t.doppler, trial);
      push(rows, snr, "err_theta_bar" + sfx, e.theta - t.azimuth, trial);
    }
  }
}

void crb_metrics(std::vector<ResultRow>& rows, double snr, int trial,
                 const ExperimentConfig& cfg, const Scene& scene, const ObservationPlan& plan,
                 double sigma2) {
  if (!cfg.crb || !(sigma2 > 0.0) || !scene.direct_paths.empty()) return;
  const CrbReport crb = fim(scene, plan, cfg.pilot, sigma2);
  const bool single = scene.ris_paths.size() == 1;
  for (std::size_t u = 0; u < scene.ris_paths.size(); ++u) {
    const std::string sfx = single ? "" : "_p" + std::to_string(u);
    push(rows, snr, "sqrt_crb_tau" + sfx, std::sqrt(crb.crb_tau[u]), trial);
    push(rows, snr, "sqrt_crb_xi" + sfx, std::sqrt(crb.crb_xi[u]), trial);
    push(rows, snr, "sqrt_crb_theta" + sfx, std::sqrt(crb.crb_theta[u]), trial);
    push(rows, snr, "sqrt_crb_phi" + sfx, std::sqrt(crb.crb_phi[u]), trial);
    push(rows, snr, "sqrt_crb_beta_re" + sfx, std::sqrt(crb.crb_beta_re[u]), trial);
    push(rows, snr, "sqrt_crb_beta_im" + sfx, std::sqrt(crb.crb_beta_im[u]), trial);
  }
}

void channel_metrics(std::vector<ResultRow>& rows, double snr, int trial,
                     const ExperimentConfig& cfg, const TrialData& data,
                     const EstimateReport& report) {
  const ArrayGeometry& geom = data.plan.geom;
  const ZcPilot& pilot = cfg.pilot;
  const double t_last = last_training_sample(data.plan, pilot);
  const double n_sym = data.plan.symbol_length;

  const std::vector<RisPath> est = to_ris_paths(report);
  const std::vector<RisPath>& truth = data.scene.ris_paths;
  if (!truth.empty() && !est.empty()) {
    push(rows, snr, "chan_rmse_ris", ris_channel_rmse(est, 0.0, truth, 0.0, geom, pilot),
         trial);
    push(rows, snr, "truth_rms_ris", ris_channel_rms(truth, geom, pilot, 0.0), trial);
    for (int off : cfg.projection_offsets) {
      const double t = t_last + off * n_sym;
      push(rows, snr, "chan_rmse_ris_proj", ris_channel_rmse(est, t, truth, t, geom, pilot),
           trial, off);
      push(rows, snr, "chan_rmse_ris_stale", ris_channel_rmse(est, 0.0, truth, t, geom, pilot),
           trial, off);
    }
  }

  if (!data.scene.direct_paths.empty() && !report.direct_paths.empty()) {
    const double adv = static_cast<double>(data.plan.ris_off_count) * n_sym;
    const std::vector<DirectPath> est_d = to_direct_paths(report, 0.0);
    const std::vector<DirectPath>& truth_d = data.scene.direct_paths;
    push(rows, snr, "chan_rmse_bs",
         direct_channel_rmse(est_d, adv, truth_d, 0.0, geom, pilot), trial);
    push(rows, snr, "truth_rms_bs", direct_channel_rms(truth_d, geom, pilot, 0.0), trial);
    for (int off : cfg.projection_offsets) {
      const double t = t_last + off * n_sym;
      push(rows, snr, "chan_rmse_bs_proj",
           direct_channel_rmse(est_d, t + adv, truth_d, t, geom, pilot), trial, off);
      push(rows, snr, "chan_rmse_bs_stale",
           direct_channel_rmse(est_d, adv, truth_d, t, geom, pilot), trial, off);
    }
    // Residual direct-link energy after the stage-1 cancellation.
    Scene direct_only;
    direct_only.direct_paths = data.scene.direct_paths;
    const CMat direct_true =
        compensate(simulate_noiseless(direct_only, data.plan, pilot, cfg.pilot_model, true, 0.0),
                   pilot);
    push(rows, snr, "direct_cancel_rel",
         (direct_true - report.direct_recon_on).norm() / data.y_on.norm(), trial);
  }

  push(rows, snr, "resid_rel",
       report.data_norm > 0 ? report.residual_norm / report.data_norm : 0.0, trial);
  push(rows, snr, "converged", report.converged ? 1.0 : 0.0, trial);
  push(rows, snr, "sage_cycles", report.iterations, trial);
}

}  // namespace

std::vector<int> match_ris_paths(const std::vector<RisPath>& truth,
                                 const std::vector<RisPathEstimate>& est, int zc_length) {
  return match_by_distance(truth, est, zc_length);
}

std::vector<int> match_direct_paths(const std::vector<DirectPath>& truth,
                                    const std::vector<DirectPathEstimate>& est, int zc_length) {
  return match_by_distance(truth, est, zc_length);
}

TrialData make_trial_data(const ExperimentConfig& cfg, int snr_index, int trial) {
  TrialData data;
  Rng scene_rng(stream_seed(cfg.seed, kTagScene, snr_index, trial));
  Rng plan_rng(stream_seed(cfg.seed, kTagPlan, snr_index, trial));
  Rng noise_rng(stream_seed(cfg.seed, kTagNoise, snr_index, trial));
  data.scene = make_scene(cfg, scene_rng);
  data.plan = make_plan(cfg, plan_rng);

  const double snr = cfg.snr_db[snr_index];
  data.y_on = simulate_noiseless(data.scene, data.plan, cfg.pilot, cfg.pilot_model, true, 0.0);
  data.sigma2 =
      std::isfinite(snr) ? signal_power(data.y_on) * std::pow(10.0, -snr / 10.0) : 0.0;
  if (cfg.mode == ExperimentMode::two_stage) {
    const double off_start =
        -static_cast<double>(data.plan.ris_off_count) * data.plan.symbol_length;
    data.y_off = simulate_noiseless(data.scene, data.plan, cfg.pilot, cfg.pilot_model, false,
                                    off_start);
    if (data.sigma2 > 0.0) add_noise(data.y_off, data.sigma2, noise_rng);
  }
  if (data.sigma2 > 0.0) add_noise(data.y_on, data.sigma2, noise_rng);
  return data;
}

namespace {

TrialResult run_trial(const ExperimentConfig& cfg, int snr_index, int trial) {
  const double snr = cfg.snr_db[snr_index];
  const TrialData data = make_trial_data(cfg, snr_index, trial);
  const DenominatorCache cache = precompute_denominator(data.plan, cfg.grid);

  EstimateReport report;
  if (cfg.mode == ExperimentMode::ris) {
    report = sage_ris(compensate(data.y_on, cfg.pilot), data.plan, cfg.pilot,
                      static_cast<int>(cfg.ris_paths.size()), cfg.grid, cache, cfg.sage);
  } else {
    report = estimate_full(data.y_off, data.y_on, data.plan, cfg.pilot,
                           static_cast<int>(cfg.ris_paths.size()),
                           static_cast<int>(cfg.direct_paths.size()), cfg.grid, cache,
                           cfg.sage);
  }

  TrialResult result;
  parameter_metrics(result.rows, snr, trial, cfg, data.scene, report);
  crb_metrics(result.rows, snr, trial, cfg, data.scene, data.plan, data.sigma2);
  channel_metrics(result.rows, snr, trial, cfg, data, report);
  return result;
}

// Aggregate per-trial rows into mean/median rows; err_* families aggregate to
// rmse_* (root mean square of the signed errors).
void append_aggregates(ResultTable& table, const std::vector<ResultRow>& trial_rows) {
  struct Key {
    double snr;
    std::string metric;
    int offset;
    bool operator<(const Key& o) const {
      if (snr != o.snr) return snr < o.snr;
      if (metric != o.metric) return metric < o.metric;
      return offset < o.offset;
    }
  };
  std::map<Key, std::vector<double>> groups;
  for (const auto& row : trial_rows) {
    groups[{row.snr_db, row.metric, row.projection_offset}].push_back(row.value);
  }
  for (auto& [key, values] : groups) {
    if (key.metric.rfind("err_", 0) == 0) {
      double ss = 0.0;
      for (double v : values) ss += v * v;
      table.rows.push_back({key.snr, "rmse_" + key.metric.substr(4),
                            std::sqrt(ss / values.size()), kTrialMean, key.offset});
      continue;
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    table.rows.push_back({key.snr, key.metric, mean, kTrialMean, key.offset});
    table.rows.push_back({key.snr, key.metric, median, kTrialMedian, key.offset});
  }
}

ResultTable run_parallel(const ExperimentConfig& cfg,
                         const std::function<TrialResult(int, int)>& job) {
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const int total = n_snr * cfg.trials;
  std::vector<TrialResult> results(total);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= total || failed.load()) break;
      try {
        results[idx] = job(idx / cfg.trials, idx % cfg.trials);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("runner: trial failed: " + first_error);

  ResultTable table;
  for (const auto& r : results) {
    table.rows.insert(table.rows.end(), r.rows.begin(), r.rows.end());
  }
  append_aggregates(table, table.rows);
  return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> errors = validate(cfg);
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return run_parallel(cfg, [&cfg](int s, int t) { return run_trial(cfg, s, t); });
}

ResultTable run_crb_only(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.crb = true;
  const std::vector<std::string> errors = validate(c);
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return run_parallel(c, [&c](int s, int t) {
    const double snr = c.snr_db[s];
    const TrialData data = make_trial_data(c, s, t);
    TrialResult result;
    crb_metrics(result.rows, snr, t, c, data.scene, data.plan, data.sigma2);
    return result;
  });
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("runner: cannot open " + path + " for writing");
  out << "# schema: rischan-results-v1\n";
  out << "snr_db,metric,value,trial,projection_offset\n";
  for (const auto& row : table.rows) {
    out << format_value(row.snr_db) << ',' << row.metric << ',' << format_value(row.value)
        << ',';
    if (row.trial == kTrialMean) {
      out << "mean";
    } else if (row.trial == kTrialMedian) {
      out << "median";
    } else {
      out << row.trial;
    }
    out << ',';
    if (row.projection_offset != kNoOffset) out << row.projection_offset;
    out << '\n';
  }
  if (!out) throw std::runtime_error("runner: short write to " + path);
}

void write_metadata(const ExperimentConfig& cfg, const std::string& path) {
  nlohmann::ordered_json meta;
  meta["schema"] = "rischan-results-v1";
  meta["seed"] = cfg.seed;
  meta["trials"] = cfg.trials;
  meta["mode"] = cfg.mode == ExperimentMode::ris ? "ris" : "two_stage";
  meta["pilot_model"] = cfg.pilot_model == PilotModel::ideal ? "ideal" : "shaped";
  std::vector<std::string> snrs;
  for (double s : cfg.snr_db) snrs.push_back(format_value(s));
  meta["snr_db"] = snrs;
  meta["projection_offsets"] = cfg.projection_offsets;
  meta["conventions"] = {
      {"snr", "per received complex sample, signal power averaged over the noiseless RIS-on block"},
      {"dft_scaling", "unitary (1/sqrt(L~)) for channel frequency responses"},
      {"projection_time",
       "T = samples elapsed after the last training sample, t_last = (K-1)N + L/2 - 1"},
      {"crb", "computed per realized phase schedule, sqrt(CRB) averaged across trials"},
      {"frequencies", "wrapped to [-0.5, 0.5); xi reported modulo 1/N"}};
  meta["plan"] = {{"ris_on_count", cfg.plan.ris_on_count},
                  {"ris_off_count", cfg.plan.ris_off_count},
                  {"efficiency", cfg.plan.efficiency},
                  {"phase_bits", cfg.plan.phase_bits},
                  {"g_seed", cfg.plan.g_seed}};
  meta["pilot"] = {{"zc_length", cfg.pilot.zc_length}, {"cp_length", cfg.pilot.cp_length},
                   {"window", cfg.pilot.window},       {"rolloff", cfg.pilot.rolloff},
                   {"oversample", cfg.pilot.oversample}, {"max_delay", cfg.pilot.max_delay},
                   {"advance", cfg.pilot.advance}};
  meta["grid"] = {{"n_theta", cfg.grid.n_theta},         {"n_phi", cfg.grid.n_phi},
                  {"n_zeta", cfg.grid.n_zeta},           {"n_xi", cfg.grid.n_xi},
                  {"n_theta_bar", cfg.grid.n_theta_bar}, {"n_zeta_bar", cfg.grid.n_zeta_bar},
                  {"n_xi_bar", cfg.grid.n_xi_bar}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("runner: cannot open " + path + " for writing");
  out << meta.dump(2) << '\n';
}

void run_and_write(const ExperimentConfig& cfg, const std::string& outdir) {
  const std::string dir = outdir.empty() ? cfg.outputs : outdir;
  std::filesystem::create_directories(dir);
  const ResultTable table = run_experiment(cfg);
  write_csv(table, dir + "/results.csv");
  write_metadata(cfg, dir + "/metadata.json");
}

}  // namespace rischan
