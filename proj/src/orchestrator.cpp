#include "afl/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afl/rng.hpp"

namespace afl {

namespace {

// Tags sit far above any client id so derived streams cannot collide.
constexpr std::uint64_t kSelectTag = 0x5E1EC7ULL << 33;
constexpr std::uint64_t kTrainTag = 1;
constexpr std::uint64_t kNoiseTag = 2;
constexpr std::uint64_t kDataTag = 0xDA7AULL << 33;

Scalar median(std::vector<Scalar> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// First 1-based round whose accuracy reaches the target.
std::optional<int> rounds_to_reach(const std::vector<RoundRecord>& records, Scalar target) {
  for (const RoundRecord& r : records) {
    if (r.test_accuracy >= target) return r.round + 1;
  }
  return std::nullopt;
}

ExperimentResult run_on_dataset(const ExperimentConfig& cfg, const FederatedDataset& dataset) {
  RoundState state = initial_state(cfg);
  ExperimentResult result;
  result.config = cfg;
  result.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
  for (int t = 0; t < cfg.rounds; ++t) {
    auto [next, record] = run_round(state, dataset, cfg, t);
    state = std::move(next);
    result.rounds.push_back(std::move(record));
  }
  result.rounds_to_target = rounds_to_reach(result.rounds, cfg.target_accuracy);
  result.final_model = std::move(state.model);
  return result;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  validate_spec(cfg.data);
  if (cfg.policy.clients_per_round < 1 || cfg.policy.clients_per_round > cfg.data.num_clients) {
    throw ConfigError("policy.clients_per_round: must be in [1, " +
                      std::to_string(cfg.data.num_clients) + "], got " +
                      std::to_string(cfg.policy.clients_per_round));
  }
  if (!(cfg.policy.temperature > 0.0)) {
    throw ConfigError("policy.temperature: must be positive, got " +
                      std::to_string(cfg.policy.temperature));
  }
  if (!(cfg.policy.uniform_mix >= 0.0 && cfg.policy.uniform_mix <= 1.0)) {
    throw ConfigError("policy.uniform_mix: must be in [0, 1], got " +
                      std::to_string(cfg.policy.uniform_mix));
  }
  if (!(cfg.train.learning_rate > 0.0)) {
    throw ConfigError("train.learning_rate: must be positive, got " +
                      std::to_string(cfg.train.learning_rate));
  }
  if (cfg.train.local_epochs < 1) {
    throw ConfigError("train.local_epochs: must be >= 1, got " +
                      std::to_string(cfg.train.local_epochs));
  }
  if (cfg.train.batch_size < 0) {
    throw ConfigError("train.batch_size: must be a positive count or \"full\"");
  }
  if (!(cfg.privacy.epsilon > 0.0)) {
    throw ConfigError("privacy.epsilon: must be positive, got " +
                      std::to_string(cfg.privacy.epsilon));
  }
  if (!(cfg.privacy.clip_bound > 0.0)) {
    throw ConfigError("privacy.clip_bound: must be positive, got " +
                      std::to_string(cfg.privacy.clip_bound));
  }
  if (cfg.rounds < 1) {
    throw ConfigError("rounds: must be >= 1, got " + std::to_string(cfg.rounds));
  }
  if (!(cfg.target_accuracy > 0.0 && cfg.target_accuracy <= 1.0)) {
    throw ConfigError("target_accuracy: must be in (0, 1], got " +
                      std::to_string(cfg.target_accuracy));
  }
  if (!(cfg.count_threshold > 0.0)) {
    throw ConfigError("count_threshold: must be positive, got " +
                      std::to_string(cfg.count_threshold));
  }
}

int RoundRecord::max_staleness() const {
  int worst = 0;
  for (const auto& [staleness, count] : staleness_histogram) worst = std::max(worst, staleness);
  return worst;
}

RoundState initial_state(const ExperimentConfig& cfg) {
  return RoundState{zero_model(cfg.data.d), initial_table(cfg.data.num_clients)};
}

std::uint64_t client_seed(std::uint64_t master_seed, int t, int client_id) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(t),
                      static_cast<std::uint64_t>(client_id)});
}

std::uint64_t client_train_seed(std::uint64_t master_seed, int t, int client_id) {
  return derive_seed({client_seed(master_seed, t, client_id), kTrainTag});
}

std::uint64_t client_noise_seed(std::uint64_t master_seed, int t, int client_id) {
  return derive_seed({client_seed(master_seed, t, client_id), kNoiseTag});
}

std::pair<RoundState, RoundRecord> run_round(const RoundState& state,
                                             const FederatedDataset& dataset,
                                             const ExperimentConfig& cfg, int t) {
  if (t >= cfg.rounds) {
    throw std::invalid_argument("run_round: round " + std::to_string(t) +
                                " is past the configured horizon");
  }
  if (dataset.num_clients() != state.table.num_clients()) {
    throw DimensionError("run_round: dataset and valuation table disagree on client count");
  }

  const SamplingDistribution dist = to_sampling_distribution(state.table, cfg.policy);
  const std::vector<int> selected =
      sample_clients(dist, cfg.policy.clients_per_round,
                     derive_seed({cfg.master_seed, static_cast<std::uint64_t>(t), kSelectTag}));

  // Per-client work is a pure function of (master_seed, t, id); the maps keep
  // aggregation and table updates in canonical id order regardless of how the
  // work itself is scheduled.
  std::map<int, Scalar> fresh;
  std::map<int, WeightedModel> updates;
  for (int id : selected) {
    const ClientDataset& data = dataset.clients[static_cast<std::size_t>(id)];
    const std::uint64_t seed = client_seed(cfg.master_seed, t, id);

    // valuation of the received model, before local training
    Scalar value = 0.0;
    if (cfg.valuation_kind == ValueKind::kLoss) {
      Vector losses = per_example_losses(state.model, data);
      if (cfg.privacy.enabled) losses = clip_per_example_losses(losses, cfg.privacy.clip_bound);
      value = loss_valuation_from_losses(losses);
    } else {
      value = static_cast<Scalar>(
          count_high_loss_valuation(data, state.model, cfg.count_threshold));
    }
    if (cfg.privacy.enabled) {
      value = privatize_valuation(value, cfg.valuation_kind, data.size(), cfg.privacy,
                                  derive_seed({seed, kNoiseTag}));
    }
    fresh[id] = value;

    updates.emplace(id, WeightedModel{
                            local_train(state.model, data, cfg.train, derive_seed({seed, kTrainTag})),
                            static_cast<Scalar>(data.size())});
  }

  std::vector<WeightedModel> ordered;
  ordered.reserve(updates.size());
  for (auto& [id, update] : updates) ordered.push_back(std::move(update));

  RoundState next;
  next.model = fedavg_aggregate(ordered);
  next.table = update_valuation_table(state.table, selected, fresh, t + 1);

  RoundRecord record;
  record.round = t;
  record.selected = selected;
  record.test_accuracy = accuracy(next.model, dataset.test_set);
  Scalar value_sum = 0.0;
  for (const Valuation& v : next.table.entries) value_sum += v.value;
  record.mean_valuation = value_sum / static_cast<Scalar>(next.table.num_clients());
  for (const Valuation& v : next.table.entries) {
    record.staleness_histogram[t - v.round_computed] += 1;
  }
  record.model_transmissions = 2 * cfg.policy.clients_per_round;
  return {std::move(next), std::move(record)};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  return run_on_dataset(cfg, generate(cfg.data));
}

ExperimentConfig with_seed(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.master_seed = seed;
  cfg.data.seed = derive_seed({seed, kDataTag});
  return cfg;
}

ComparisonSummary compare_strategies(const ExperimentConfig& base,
                                     const std::vector<std::uint64_t>& seeds,
                                     TargetMode mode) {
  validate(base);
  if (seeds.size() < 2) {
    throw ConfigError("seeds: compare needs at least 2 seeds, got " +
                      std::to_string(seeds.size()));
  }

  ComparisonSummary summary;
  summary.target_mode = mode;
  summary.base_config = base;

  std::vector<Scalar> reductions;
  std::vector<Scalar> accuracy_deltas;
  for (std::uint64_t seed : seeds) {
    ExperimentConfig uniform_cfg = with_seed(base, seed);
    uniform_cfg.policy.kind = PolicyKind::kUniform;
    ExperimentConfig afl_cfg = with_seed(base, seed);
    afl_cfg.policy.kind = PolicyKind::kAfl;

    const FederatedDataset dataset = generate(uniform_cfg.data);
    ExperimentResult uniform_result = run_on_dataset(uniform_cfg, dataset);

    SeedComparison entry;
    entry.seed = seed;
    entry.target_accuracy = base.target_accuracy;
    if (mode == TargetMode::kUniformFinal) {
      entry.target_accuracy = uniform_result.rounds.back().test_accuracy;
      uniform_result.rounds_to_target = rounds_to_reach(uniform_result.rounds, entry.target_accuracy);
      afl_cfg.target_accuracy = entry.target_accuracy;
    }
    const ExperimentResult afl_result = run_on_dataset(afl_cfg, dataset);

    entry.uniform_rounds = uniform_result.rounds_to_target;
    entry.afl_rounds = afl_result.rounds_to_target;
    entry.uniform_final_accuracy = uniform_result.rounds.back().test_accuracy;
    entry.afl_final_accuracy = afl_result.rounds.back().test_accuracy;

    const Scalar unreached = static_cast<Scalar>(base.rounds + 1);
    const Scalar u = entry.uniform_rounds ? static_cast<Scalar>(*entry.uniform_rounds) : unreached;
    const Scalar a = entry.afl_rounds ? static_cast<Scalar>(*entry.afl_rounds) : unreached;
    entry.relative_reduction = (u - a) / u;
    if (a < u) ++summary.afl_wins;

    reductions.push_back(entry.relative_reduction);
    accuracy_deltas.push_back(std::abs(entry.afl_final_accuracy - entry.uniform_final_accuracy));
    summary.per_seed.push_back(entry);
  }
  summary.median_relative_reduction = median(reductions);
  summary.median_abs_accuracy_delta = median(accuracy_deltas);
  return summary;
}

}  // namespace afl
