// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "afl/json_io.hpp"
#include "afl/orchestrator.hpp"
#include "afl/privacy.hpp"
#include "afl/rng.hpp"
#include "afl/selection.hpp"
#include "afl/valuation.hpp"
#include "support.hpp"

using namespace afl;

namespace {

struct Gate {
  int failed = 0;

  void check(int number, const std::string& description, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number,
                description.c_str(), detail.c_str());
    if (!ok) ++failed;
  }
};

// The reference scenario: the comparison data spec plus the artifact's
// default policy and training regime.
ExperimentConfig reference_config() {
  ExperimentConfig cfg;
  cfg.data.d = 10;
  cfg.data.num_clients = 100;
  cfg.data.n_min = 20;
  cfg.data.n_max = 200;
  cfg.data.minority_fraction = 0.05;
  cfg.data.separation = 0.8;
  cfg.data.noise_rate = 0.2;
  cfg.data.noise_decay = 2.0;
  cfg.data.skew = 1.5;
  cfg.policy.kind = PolicyKind::kAfl;
  cfg.policy.temperature = 1.0;
  cfg.policy.uniform_mix = 0.1;
  cfg.policy.clients_per_round = 10;
  cfg.train.learning_rate = 0.2;
  cfg.train.local_epochs = 5;
  cfg.train.batch_size = 32;
  cfg.privacy.enabled = false;
  cfg.rounds = 150;
  cfg.valuation_kind = ValueKind::kLoss;
  cfg.master_seed = 1;
  return cfg;
}

ClientDataset random_dataset(Rng& rng, Index n, Index d) {
  ClientDataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.features(i, j) = rng.normal();
    data.labels(i) = rng.uniform01() < 0.5 ? 0.0 : 1.0;
  }
  return data;
}

ModelParams random_model(Rng& rng, Index d) {
  ModelParams m = zero_model(d);
  for (Index j = 0; j < d; ++j) m.weights(j) = rng.normal();
  m.bias = rng.normal();
  return m;
}

void criteria_1_and_2(Gate& gate) {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const ComparisonSummary summary =
      compare_strategies(reference_config(), seeds, TargetMode::kUniformFinal);

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "afl earlier in %d/10 seeds, median relative reduction %.3f; need >= 8/10 and >= 0.15",
                summary.afl_wins, summary.median_relative_reduction);
  gate.check(1, "afl reaches the uniform arm's round-150 accuracy in fewer rounds",
             summary.afl_wins >= 8 && summary.median_relative_reduction >= 0.15, detail);

  std::snprintf(detail, sizeof(detail),
                "median |final accuracy delta| = %.4f; need < 0.01",
                summary.median_abs_accuracy_delta);
  gate.check(2, "final accuracy parity between afl and uniform",
             summary.median_abs_accuracy_delta < 0.01, detail);
}

void criterion_3(Gate& gate) {
  Rng rng(30001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.uniform_below(8));
    const Index n = 1 + static_cast<Index>(rng.uniform_below(16));
    const ClientDataset data = random_dataset(rng, n, d);
    const ModelParams m = random_model(rng, d);
    const Vector analytic = gradient(m, data);
    const Vector numeric = testsupport::finite_difference_gradient(m, data, 1e-6);
    worst = std::max(worst, (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12));
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "worst relative error %.3g over 100 cases; need < 1e-5", worst);
  gate.check(3, "analytic gradient matches central finite differences", worst < 1e-5, detail);
}

void criterion_4(Gate& gate) {
  Rng rng(30002);
  ValuationTable table = initial_table(16);
  long long mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> selected;
    std::map<int, Scalar> fresh;
    for (int id = 0; id < 16; ++id) {
      if (rng.uniform01() < 0.3) {
        selected.push_back(id);
        fresh[id] = 10.0 * rng.normal();
      }
    }
    const int new_round = table.current_round + 1;

    // naive reimplementation of the update rule
    ValuationTable expected = table;
    expected.current_round = new_round;
    for (int id : selected) {
      expected.entries[static_cast<std::size_t>(id)] = Valuation{fresh.at(id), table.current_round};
    }

    const ValuationTable actual = update_valuation_table(table, selected, fresh, new_round);
    for (int id = 0; id < 16; ++id) {
      if (actual.entries[static_cast<std::size_t>(id)].value !=
              expected.entries[static_cast<std::size_t>(id)].value ||
          actual.entries[static_cast<std::size_t>(id)].round_computed !=
              expected.entries[static_cast<std::size_t>(id)].round_computed) {
        ++mismatches;
      }
    }
    table = actual;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%lld entry mismatches over 1000 random triples; need 0",
                mismatches);
  gate.check(4, "valuation-table update matches a naive reimplementation exactly",
             mismatches == 0, detail);
}

void criterion_5(Gate& gate) {
  Rng rng(30003);
  bool ok = true;
  std::string why = "normalization, shift invariance, exact limits, monotonicity all hold";
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_below(31));
    ValuationTable table = initial_table(k);
    for (int i = 0; i < k; ++i) table.entries[static_cast<std::size_t>(i)].value = 3.0 * rng.normal();

    SelectionPolicy policy;
    policy.kind = PolicyKind::kAfl;
    policy.temperature = 0.1 + 2.0 * rng.uniform01();
    policy.uniform_mix = rng.uniform01();
    const SamplingDistribution dist = to_sampling_distribution(table, policy);
    if (std::abs(dist.probs.sum() - 1.0) > 1e-12 || dist.probs.minCoeff() < 0.0) {
      ok = false;
      why = "normalization violated";
      break;
    }

    ValuationTable shifted = table;
    const Scalar c = 10.0 * rng.normal();
    for (auto& e : shifted.entries) e.value += c;
    if ((to_sampling_distribution(shifted, policy).probs - dist.probs).cwiseAbs().maxCoeff() >
        1e-12) {
      ok = false;
      why = "shift invariance violated";
      break;
    }

    SelectionPolicy cold = policy;
    cold.temperature = 1e-300;
    cold.uniform_mix = 0.0;
    const SamplingDistribution uniform_cold = to_sampling_distribution(table, cold);
    SelectionPolicy mixed = policy;
    mixed.uniform_mix = 1.0;
    const SamplingDistribution uniform_mixed = to_sampling_distribution(table, mixed);
    for (int i = 0; i < k; ++i) {
      if (uniform_cold.probs(i) != 1.0 / static_cast<Scalar>(k) ||
          uniform_mixed.probs(i) != 1.0 / static_cast<Scalar>(k)) {
        ok = false;
        why = "uniform limit not exact";
        break;
      }
    }
    if (!ok) break;

    SelectionPolicy pure = policy;
    pure.uniform_mix = 0.0;
    const SamplingDistribution mono = to_sampling_distribution(table, pure);
    for (int i = 0; i < k && ok; ++i) {
      for (int j = 0; j < k; ++j) {
        if (table.entries[static_cast<std::size_t>(i)].value >
                table.entries[static_cast<std::size_t>(j)].value &&
            mono.probs(i) <= mono.probs(j)) {
          ok = false;
          why = "monotonicity violated";
          break;
        }
      }
    }
  }
  gate.check(5, "sampling-distribution normalization, shift invariance, limits, monotonicity",
             ok, why + "; 1000 random tables");
}

void criterion_6(Gate& gate) {
  SamplingDistribution dist;
  dist.probs = Vector::Zero(3);
  dist.probs << 0.5, 0.3, 0.2;
  const std::vector<double> expected = testsupport::inclusion_probabilities({0.5, 0.3, 0.2}, 2);

  const int trials = 100000;
  std::vector<int> hits(3, 0);
  for (int s = 0; s < trials; ++s) {
    for (int id : sample_clients(dist, 2, derive_seed({31337, static_cast<std::uint64_t>(s)}))) {
      ++hits[static_cast<std::size_t>(id)];
    }
  }
  bool ok = true;
  double worst_z = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double p = expected[static_cast<std::size_t>(i)];
    const double freq = static_cast<double>(hits[static_cast<std::size_t>(i)]) / trials;
    const double z = std::abs(freq - p) / std::sqrt(p * (1.0 - p) / trials);
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ok = false;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "worst deviation %.2f standard errors over 100000 draws; need <= 3", worst_z);
  gate.check(6, "without-replacement sampling matches the enumeration oracle", ok, detail);
}

void criterion_7(Gate& gate) {
  Rng rng(30004);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.uniform_below(4));
    const Index n = 1 + static_cast<Index>(rng.uniform_below(20));
    const ClientDataset data = random_dataset(rng, n, d);
    const ModelParams m = random_model(rng, d);
    const Scalar threshold = 0.05 + 2.0 * rng.uniform01();
    const int base = count_high_loss_valuation(data, m, threshold);

    ClientDataset grown;
    grown.features.resize(n + 1, d);
    grown.features.topRows(n) = data.features;
    for (Index j = 0; j < d; ++j) grown.features(n, j) = rng.normal();
    grown.labels.resize(n + 1);
    grown.labels.head(n) = data.labels;
    grown.labels(n) = rng.uniform01() < 0.5 ? 0.0 : 1.0;
    if (std::abs(count_high_loss_valuation(grown, m, threshold) - base) > 1) ++violations;

    if (n > 1) {
      const Index victim = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      ClientDataset shrunk;
      shrunk.features.resize(n - 1, d);
      shrunk.labels.resize(n - 1);
      Index w = 0;
      for (Index i = 0; i < n; ++i) {
        if (i == victim) continue;
        shrunk.features.row(w) = data.features.row(i);
        shrunk.labels(w) = data.labels(i);
        ++w;
      }
      if (std::abs(count_high_loss_valuation(shrunk, m, threshold) - base) > 1) ++violations;
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d violations over 1000 neighboring pairs; need 0",
                violations);
  gate.check(7, "count valuation has sensitivity 1", violations == 0, detail);
}

void criterion_8(Gate& gate) {
  bool ok = true;
  double worst_mad_err = 0.0, worst_q_err = 0.0;
  const double quantile_points[] = {0.10, 0.25, 0.50, 0.75, 0.90};
  int scale_index = 0;
  for (const double scale : {0.5, 2.0, 7.0}) {
    const int n = 100000;
    std::vector<double> draws(n);
    double abs_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      draws[static_cast<std::size_t>(i)] = laplace_noise(
          scale, derive_seed({31, static_cast<std::uint64_t>(scale_index),
                              static_cast<std::uint64_t>(i)}));
      abs_sum += std::abs(draws[static_cast<std::size_t>(i)]);
    }
    const double mad_err = std::abs(abs_sum / n - scale) / scale;
    worst_mad_err = std::max(worst_mad_err, mad_err);
    if (mad_err > 0.02) ok = false;

    std::sort(draws.begin(), draws.end());
    for (const double p : quantile_points) {
      const double expected =
          p < 0.5 ? scale * std::log(2.0 * p) : (p > 0.5 ? -scale * std::log(2.0 * (1.0 - p)) : 0.0);
      const double err = std::abs(testsupport::quantile_sorted(draws, p) - expected) / scale;
      worst_q_err = std::max(worst_q_err, err);
      if (err > 0.02) ok = false;
    }
    ++scale_index;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "worst MAD error %.4f, worst quantile error %.4f (relative to scale); need <= 0.02",
                worst_mad_err, worst_q_err);
  gate.check(8, "Laplace mechanism moments and quantiles at three scales", ok, detail);
}

void criterion_9(Gate& gate) {
  const int seeds = 20;
  const int warmup_rounds = 5;
  int above = 0;
  std::vector<double> rhos;
  for (int s = 1; s <= seeds; ++s) {
    ExperimentConfig cfg = with_seed(reference_config(), static_cast<std::uint64_t>(s));
    cfg.rounds = warmup_rounds;
    cfg.target_accuracy = 0.9999;
    const FederatedDataset dataset = generate(cfg.data);
    const ExperimentResult warm = run_experiment(cfg);

    std::vector<double> fractions, valuations;
    for (int k = 0; k < cfg.data.num_clients; ++k) {
      fractions.push_back(dataset.per_client_minority_fraction[static_cast<std::size_t>(k)]);
      valuations.push_back(
          loss_valuation(dataset.clients[static_cast<std::size_t>(k)], warm.final_model));
    }
    const double rho = testsupport::spearman(fractions, valuations);
    rhos.push_back(rho);
    if (rho > 0.5) ++above;
  }
  // sign test, H0: median rho <= 0.5; P(X >= 15 | n=20, p=1/2) ~ 0.021 < 0.05
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "rho > 0.5 in %d/20 seeds (median rho %.3f); need >= 15/20 for the 0.05-level sign test",
                above, testsupport::median(rhos));
  gate.check(9, "minority-heavy clients get higher loss valuations after warmup", above >= 15,
             detail);
}

void criterion_10(Gate& gate) {
  ExperimentConfig cfg = with_seed(reference_config(), 4242);
  cfg.rounds = 30;
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  const std::string json_a = to_json(a).dump(2);
  const std::string json_b = to_json(b).dump(2);
  const std::string csv_a = round_records_csv(a.rounds);
  const std::string csv_b = round_records_csv(b.rounds);
  const bool ok = json_a == json_b && csv_a == csv_b;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%zu-byte JSON and %zu-byte CSV outputs identical: %s",
                json_a.size(), csv_a.size(), ok ? "yes" : "no");
  gate.check(10, "reruns with identical config and seed are byte-identical", ok, detail);
}

}  // namespace

int main() {
  Gate gate;
  criteria_1_and_2(gate);
  criterion_3(gate);
  criterion_4(gate);
  criterion_5(gate);
  criterion_6(gate);
  criterion_7(gate);
  criterion_8(gate);
  criterion_9(gate);
  criterion_10(gate);
  std::printf("%d of 10 criteria passed\n", 10 - gate.failed);
  return gate.failed == 0 ? 0 : 1;
}
