// Command-line front end: run one experiment, compare selection policies over
// seeds, export a synthetic dataset, or just validate a config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "afl/json_io.hpp"
#include "afl/orchestrator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

afl::Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw afl::ConfigError("cannot open config file: " + path);
  try {
    return afl::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw afl::ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

afl::ConfigDocument load_config(const std::string& path) {
  return afl::config_from_json(load_json(path));
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_command(const std::string& config_path, const std::string& out,
                std::optional<std::uint64_t> seed) {
  afl::ConfigDocument doc = load_config(config_path);
  if (seed) doc.experiment = afl::with_seed(doc.experiment, *seed);
  const afl::ExperimentResult result = afl::run_experiment(doc.experiment);
  const auto dir = prepare_out_dir(out);
  afl::write_file_atomic(dir / "result.json", afl::to_json(result).dump(2) + "\n");
  afl::write_file_atomic(dir / "rounds.csv", afl::round_records_csv(result.rounds));
  if (result.rounds_to_target) {
    std::cout << "reached target accuracy in " << *result.rounds_to_target << " rounds\n";
  } else {
    std::cout << "target accuracy not reached in " << doc.experiment.rounds << " rounds\n";
  }
  std::cout << "wrote " << (dir / "result.json").string() << " and "
            << (dir / "rounds.csv").string() << "\n";
  return kExitOk;
}

int compare_command(const std::string& config_path, const std::string& out,
                    const std::vector<std::uint64_t>& seeds) {
  const afl::ConfigDocument doc = load_config(config_path);
  const afl::ComparisonSummary summary =
      afl::compare_strategies(doc.experiment, seeds, doc.target_mode);
  const auto dir = prepare_out_dir(out);
  afl::write_file_atomic(dir / "comparison.json", afl::to_json(summary).dump(2) + "\n");
  std::cout << "afl reached the target earlier in " << summary.afl_wins << "/"
            << summary.per_seed.size() << " seeds; median relative reduction "
            << summary.median_relative_reduction << "\n";
  std::cout << "wrote " << (dir / "comparison.json").string() << "\n";
  return kExitOk;
}

int gen_data_command(const std::string& config_path, const std::string& out,
                     std::optional<std::uint64_t> seed) {
  afl::ConfigDocument doc = load_config(config_path);
  if (seed) doc.experiment.data.seed = *seed;
  const afl::FederatedDataset dataset = afl::generate(doc.experiment.data);
  const auto dir = prepare_out_dir(out);
  afl::write_file_atomic(dir / "dataset.json",
                         afl::to_json(dataset, doc.experiment.data).dump(2) + "\n");
  std::cout << "wrote " << (dir / "dataset.json").string() << " (" << dataset.num_clients()
            << " clients, " << dataset.total_examples() << " examples)\n";
  return kExitOk;
}

int validate_command(const std::string& config_path) {
  load_config(config_path);
  std::cout << "config OK\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aflsim: deterministic federated-learning simulator with valuation-driven client selection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;

  auto* run = app.add_subcommand("run", "run one experiment and write result.json + rounds.csv");
  run->add_option("--config", config_path, "config JSON path")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "replicate seed override (master seed + derived data seed)");

  auto* compare = app.add_subcommand("compare", "run uniform vs afl over seeds and write comparison.json");
  compare->add_option("--config", config_path, "config JSON path")->required();
  compare->add_option("--out", out_dir, "output directory");
  compare->add_option("--seeds", seeds, "comma-separated replicate seeds")
      ->required()
      ->delimiter(',');

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset and write dataset.json");
  gen->add_option("--config", config_path, "config JSON path")->required();
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--seed", seed, "data seed override");

  auto* validate = app.add_subcommand("validate-config", "check config invariants without running");
  validate->add_option("--config", config_path, "config JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run->parsed()) return run_command(config_path, out_dir, seed);
    if (compare->parsed()) return compare_command(config_path, out_dir, seeds);
    if (gen->parsed()) return gen_data_command(config_path, out_dir, seed);
    if (validate->parsed()) return validate_command(config_path);
  } catch (const afl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
