// Batch CLI for the RIS-assisted MIMO uplink channel estimation experiments.
//
// Subcommands:
//   run       Monte-Carlo experiment -> results.csv + metadata.json
//   crb       Cramer-Rao bounds only -> crb.csv + metadata.json
//   synth     synthesize one trial's received block(s) -> .risy dumps
//   validate  check a config file and report every violation

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rischan/blockio.hpp"
#include "rischan/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int seed = -1;
  int threads = 0;
  std::string pilot_model;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_out) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", args.out_dir, "output directory");
  if (need_out) out->required(false);
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--threads", args.threads, "trial-level worker threads");
  cmd->add_option("--pilot-model", args.pilot_model, "ideal|shaped pilot synthesis")
      ->check(CLI::IsMember({"ideal", "shaped"}));
}

rischan::ExperimentConfig load(const CommonArgs& args) {
  rischan::ExperimentConfig cfg = rischan::load_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.threads > 0) cfg.threads = args.threads;
  if (!args.out_dir.empty()) cfg.outputs = args.out_dir;
  if (args.pilot_model == "ideal") cfg.pilot_model = rischan::PilotModel::ideal;
  if (args.pilot_model == "shaped") cfg.pilot_model = rischan::PilotModel::shaped;
  return cfg;
}

int report_validation(const rischan::ExperimentConfig& cfg) {
  const std::vector<std::string> errors = rischan::validate(cfg);
  if (errors.empty()) {
    std::cout << "config ok\n";
    return 0;
  }
  std::cerr << "config invalid:\n";
  for (const auto& e : errors) std::cerr << "  " << e << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted MIMO uplink channel estimation toolkit"};
  app.require_subcommand(1);

  CommonArgs run_args, crb_args, synth_args, val_args;
  int synth_trial = 0;
  int synth_snr_index = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "run a Monte-Carlo experiment");
  add_common(run_cmd, run_args, true);

  CLI::App* crb_cmd = app.add_subcommand("crb", "compute Cramer-Rao bounds only");
  add_common(crb_cmd, crb_args, true);

  CLI::App* synth_cmd = app.add_subcommand("synth", "dump one trial's received block(s)");
  add_common(synth_cmd, synth_args, true);
  synth_cmd->add_option("--trial", synth_trial, "trial index");
  synth_cmd->add_option("--snr-index", synth_snr_index, "index into snr_db");

  CLI::App* val_cmd = app.add_subcommand("validate", "validate a config file");
  add_common(val_cmd, val_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const rischan::ExperimentConfig cfg = load(run_args);
      rischan::run_and_write(cfg);
      std::cout << "wrote " << cfg.outputs << "/results.csv\n";
      return 0;
    }
    if (crb_cmd->parsed()) {
      const rischan::ExperimentConfig cfg = load(crb_args);
      const rischan::ResultTable table = rischan::run_crb_only(cfg);
      std::filesystem::create_directories(cfg.outputs);
      rischan::write_csv(table, cfg.outputs + "/crb.csv");
      rischan::write_metadata(cfg, cfg.outputs + "/metadata.json");
      std::cout << "wrote " << cfg.outputs << "/crb.csv\n";
      return 0;
    }
    if (synth_cmd->parsed()) {
      const rischan::ExperimentConfig cfg = load(synth_args);
      if (int rc = report_validation(cfg); rc != 0) return rc;
      if (synth_snr_index < 0 || synth_snr_index >= static_cast<int>(cfg.snr_db.size())) {
        std::cerr << "snr-index out of range\n";
        return 1;
      }
      const rischan::TrialData data =
          rischan::make_trial_data(cfg, synth_snr_index, synth_trial);
      std::filesystem::create_directories(cfg.outputs);
      rischan::write_risy(cfg.outputs + "/block_on.risy", data.y_on);
      std::cout << "wrote " << cfg.outputs << "/block_on.risy (" << data.y_on.rows() << "x"
                << data.y_on.cols() << ")\n";
      if (data.y_off.size() > 0) {
        rischan::write_risy(cfg.outputs + "/block_off.risy", data.y_off);
        std::cout << "wrote " << cfg.outputs << "/block_off.risy (" << data.y_off.rows()
                  << "x" << data.y_off.cols() << ")\n";
      }
      return 0;
    }
    if (val_cmd->parsed()) {
      return report_validation(load(val_args));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
