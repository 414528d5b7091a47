#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isar/commands.hpp"
#include "isar/config.hpp"

using isar::cli::ExperimentConfig;

namespace {

std::string default_output_dir() {
  const char* env = std::getenv("ISAR_OUTPUT_DIR");
  return env && *env ? env : ".";
}

// Defaults -> config file -> per-key flags -> --set overrides (later wins).
struct ConfigArgs {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> key_flags;
  std::vector<std::string> sets;

  ExperimentConfig build() const {
    ExperimentConfig cfg = config_file.empty() ? ExperimentConfig{}
                                               : ExperimentConfig::from_file(config_file);
    for (const auto& [key, value] : key_flags) cfg.set(key, value);
    for (const auto& kv : sets) cfg.apply_override(kv);
    return cfg;
  }
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_file, "experiment config file (key = value lines)");
  cmd->add_option("--set", args.sets, "override a config key (key=value, repeatable)");
  for (const auto& key : ExperimentConfig::keys()) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&args, key](const std::string& value) { args.key_flags.emplace_back(key, value); },
        "config key " + key);
  }
}

std::string join_dir(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale UWB circular-aperture radar imaging toolkit"};
  app.require_subcommand(1);

  const std::string out_dir = default_output_dir();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "simulate a point-target sinogram");
  ConfigArgs sim_args;
  add_config_options(simulate, sim_args);
  std::string sim_out = join_dir(out_dir, "sinogram.isgm");
  bool sim_preview = false;
  simulate->add_option("--out", sim_out, "output sinogram path (.isgm or .csv)");
  simulate->add_flag("--preview", sim_preview, "also write a PGM preview of the sinogram");

  // bp
  auto* bp = app.add_subcommand("bp", "time-domain backprojection reconstruction");
  ConfigArgs bp_args;
  add_config_options(bp, bp_args);
  std::string bp_sino = join_dir(out_dir, "sinogram.isgm");
  std::string bp_out = join_dir(out_dir, "bp");
  bool bp_metrics = false;
  bp->add_option("--sinogram", bp_sino, "input sinogram file");
  bp->add_option("--out", bp_out, "output prefix (writes .pgm/.iflt)");
  bp->add_flag("--metrics", bp_metrics, "score against the config scene's ground truth");

  // ats
  auto* ats = app.add_subcommand("ats", "analysis-through-synthesis reconstruction");
  ConfigArgs ats_args;
  add_config_options(ats, ats_args);
  std::string ats_sino = join_dir(out_dir, "sinogram.isgm");
  std::string ats_out = join_dir(out_dir, "ats");
  bool ats_metrics = false;
  ats->add_option("--sinogram", ats_sino, "input sinogram file");
  ats->add_option("--out", ats_out, "output prefix (writes .pgm/.iflt/.ckpt/_loss.csv)");
  ats->add_flag("--metrics", ats_metrics, "score against the config scene's ground truth");

  // metrics
  auto* met = app.add_subcommand("metrics", "compare two raw float images");
  ConfigArgs met_args;
  add_config_options(met, met_args);
  std::string met_recon, met_truth, met_out;
  met->add_option("--recon", met_recon, "reconstruction (.iflt)")->required();
  met->add_option("--truth", met_truth, "reference (.iflt)")->required();
  met->add_option("--out", met_out, "optional report path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a comparison sweep (simulate -> bp -> ats)");
  ConfigArgs sweep_args;
  add_config_options(sweep, sweep_args);
  std::string sweep_kind;
  std::string sweep_out = out_dir;
  sweep->add_option("--kind", sweep_kind, "noise | skip | partial | reflectors")->required();
  sweep->add_option("--out-dir", sweep_out, "output directory for CSV and images");

  // info
  auto* info = app.add_subcommand("info", "describe a sinogram/image/checkpoint file");
  std::string info_path;
  info->add_option("file", info_path, "file to describe")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const auto cfg = sim_args.build();
      const std::string preview = sim_preview ? sim_out + ".pgm" : "";
      return isar::cli::cmd_simulate(cfg, sim_out, preview);
    }
    if (bp->parsed()) return isar::cli::cmd_bp(bp_args.build(), bp_sino, bp_out, bp_metrics);
    if (ats->parsed()) return isar::cli::cmd_ats(ats_args.build(), ats_sino, ats_out, ats_metrics);
    if (met->parsed()) return isar::cli::cmd_metrics(met_args.build(), met_recon, met_truth, met_out);
    if (sweep->parsed()) return isar::cli::cmd_sweep(sweep_args.build(), sweep_kind, sweep_out);
    if (info->parsed()) return isar::cli::cmd_info(info_path);
  } catch (const isar::cli::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return isar::cli::kExitConfigError;
  }
  return isar::cli::kExitConfigError;
}
