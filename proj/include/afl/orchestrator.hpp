#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "afl/datagen.hpp"
#include "afl/model.hpp"
#include "afl/privacy.hpp"
#include "afl/selection.hpp"
#include "afl/valuation.hpp"

namespace afl {

struct ExperimentConfig {
  SyntheticSpec data;
  SelectionPolicy policy;
  TrainConfig train;
  PrivacyConfig privacy;
  int rounds = 150;  // T
  Scalar target_accuracy = 0.95;
  std::uint64_t master_seed = 1;
  ValueKind valuation_kind = ValueKind::kLoss;
  Scalar count_threshold = kDefaultCountThreshold;
};

// Throws ConfigError naming the offending field (snake_case, as in the JSON
// schema) on the first violated invariant.
void validate(const ExperimentConfig& cfg);

struct RoundRecord {
  int round = 0;
  std::vector<int> selected;  // S_t in draw order
  Scalar test_accuracy = 0.0;
  Scalar mean_valuation = 0.0;
  // rounds since each client's valuation refresh -> number of clients
  std::map<int, int> staleness_histogram;
  int model_transmissions = 0;  // 2m: one download + one upload per selected client

  int max_staleness() const;
};

struct RoundState {
  ModelParams model;
  ValuationTable table;
};

struct ExperimentResult {
  std::vector<RoundRecord> rounds;
  std::optional<int> rounds_to_target;  // 1-based round count; empty = not reached
  ModelParams final_model;
  ExperimentConfig config;
};

// Zero model, constant-zero valuation table.
RoundState initial_state(const ExperimentConfig& cfg);

// Every per-client random stream this round hangs off this seed, so results
// do not depend on the order clients are processed in.
std::uint64_t client_seed(std::uint64_t master_seed, int t, int client_id);

// Sub-seeds actually fed to local_train and to the privacy noise draw.
std::uint64_t client_train_seed(std::uint64_t master_seed, int t, int client_id);
std::uint64_t client_noise_seed(std::uint64_t master_seed, int t, int client_id);

// One round: convert the table to a sampling distribution, draw S_t, have
// each selected client value the broadcast model (privatized when enabled)
// and train locally, aggregate by client size, refresh the table for S_t
// only. The returned state replaces the input atomically.
std::pair<RoundState, RoundRecord> run_round(const RoundState& state,
                                             const FederatedDataset& dataset,
                                             const ExperimentConfig& cfg, int t);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Replicate convention: a run seed replaces master_seed and re-seeds the data
// generator, so different seeds are fully independent replicates.
ExperimentConfig with_seed(ExperimentConfig cfg, std::uint64_t seed);

// How compare_strategies picks the accuracy both arms chase: the config's
// fixed target, or the uniform arm's final-round accuracy per seed.
enum class TargetMode { kFixed, kUniformFinal };

struct SeedComparison {
  std::uint64_t seed = 0;
  std::optional<int> uniform_rounds;
  std::optional<int> afl_rounds;
  Scalar uniform_final_accuracy = 0.0;
  Scalar afl_final_accuracy = 0.0;
  Scalar target_accuracy = 0.0;
  // (u - a) / u with an unreached arm counted as rounds + 1
  Scalar relative_reduction = 0.0;
};

struct ComparisonSummary {
  std::vector<SeedComparison> per_seed;  // in seed argument order
  Scalar median_relative_reduction = 0.0;
  Scalar median_abs_accuracy_delta = 0.0;
  int afl_wins = 0;  // seeds where afl reached the target strictly earlier
  TargetMode target_mode = TargetMode::kFixed;
  ExperimentConfig base_config;
};

// Runs a uniform arm and an afl arm per seed, all else equal.
ComparisonSummary compare_strategies(const ExperimentConfig& base,
                                     const std::vector<std::uint64_t>& seeds,
                                     TargetMode mode = TargetMode::kFixed);

}  // namespace afl
