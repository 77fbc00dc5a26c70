#include "afl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "afl/rng.hpp"

namespace afl {

namespace {

constexpr std::uint64_t kAllocTag = 0xA110C;
constexpr std::uint64_t kClientTag = 0xC11E17;
constexpr std::uint64_t kTestTag = 0x7E57;

// Capped largest-remainder split of `total` minority examples over clients,
// proportional to size * weight.
std::vector<Index> allocate_minority(const std::vector<Index>& sizes,
                                     const std::vector<Scalar>& weights,
                                     long long total) {
  const std::size_t k = sizes.size();
  Scalar mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) mass += static_cast<Scalar>(sizes[i]) * weights[i];
  if (!(mass > 0.0)) throw GenerationError("minority allocation has zero total weight");

  std::vector<Index> counts(k);
  std::vector<std::pair<Scalar, std::size_t>> remainders(k);
  long long assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Scalar raw =
        static_cast<Scalar>(total) * static_cast<Scalar>(sizes[i]) * weights[i] / mass;
    counts[i] = std::min<Index>(static_cast<Index>(std::floor(raw)), sizes[i]);
    remainders[i] = {raw - std::floor(raw), i};
    assigned += counts[i];
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  long long leftover = total - assigned;
  while (leftover > 0) {
    bool placed = false;
    for (const auto& [rem, i] : remainders) {
      if (leftover == 0) break;
      if (counts[i] < sizes[i]) {
        ++counts[i];
        --leftover;
        placed = true;
      }
    }
    if (!placed) {
      throw GenerationError("cannot place " + std::to_string(leftover) +
                            " minority examples: client capacity exhausted");
    }
  }
  return counts;
}

}  // namespace

void validate_spec(const SyntheticSpec& spec) {
  if (spec.d < 1) throw ConfigError("data.d: must be >= 1, got " + std::to_string(spec.d));
  if (spec.num_clients < 2) {
    throw ConfigError("data.num_clients: must be >= 2, got " + std::to_string(spec.num_clients));
  }
  if (spec.n_min < 1) throw ConfigError("data.n_min: must be >= 1, got " + std::to_string(spec.n_min));
  if (spec.n_max < spec.n_min) {
    throw ConfigError("data.n_max: must be >= n_min, got " + std::to_string(spec.n_max));
  }
  if (!(spec.minority_fraction > 0.0 && spec.minority_fraction < 0.5)) {
    throw ConfigError("data.minority_fraction: must be in (0, 0.5), got " +
                      std::to_string(spec.minority_fraction));
  }
  if (!(spec.separation > 0.0)) {
    throw ConfigError("data.separation: must be positive, got " + std::to_string(spec.separation));
  }
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0)) {
    throw ConfigError("data.noise_rate: must be in [0, 1), got " + std::to_string(spec.noise_rate));
  }
  if (!(spec.noise_decay > 0.0)) {
    throw ConfigError("data.noise_decay: must be positive, got " + std::to_string(spec.noise_decay));
  }
  if (!(spec.skew >= 0.0)) {
    throw ConfigError("data.skew: must be >= 0, got " + std::to_string(spec.skew));
  }
}

FederatedDataset generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  const int k = spec.num_clients;
  const Scalar half_sep = spec.separation / 2.0;

  Rng alloc(derive_seed({spec.seed, kAllocTag}));
  std::vector<Index> sizes(static_cast<std::size_t>(k));
  Index total = 0;
  for (auto& n : sizes) {
    n = spec.n_min +
        static_cast<Index>(alloc.uniform_below(static_cast<std::uint64_t>(spec.n_max - spec.n_min) + 1));
    total += n;
  }

  const long long minority_total = std::llround(spec.minority_fraction * static_cast<Scalar>(total));
  if (minority_total < 1) {
    throw GenerationError("minority_fraction " + std::to_string(spec.minority_fraction) +
                          " of " + std::to_string(total) + " examples rounds to zero");
  }

  // skew = 0 keeps every client at the global fraction; larger skew piles the
  // minority mass onto the clients with the largest weight draws
  std::vector<Scalar> weights(static_cast<std::size_t>(k), 1.0);
  if (spec.skew > 0.0) {
    for (auto& w : weights) w = std::pow(alloc.uniform_open01(), spec.skew);
  }
  const std::vector<Index> minority_counts = allocate_minority(sizes, weights, minority_total);

  FederatedDataset out;
  out.clients.resize(static_cast<std::size_t>(k));
  out.per_client_minority_fraction.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const Index n = sizes[static_cast<std::size_t>(c)];
    const Index minority = minority_counts[static_cast<std::size_t>(c)];
    Rng rng(derive_seed({spec.seed, static_cast<std::uint64_t>(c), kClientTag}));
    ClientDataset& data = out.clients[static_cast<std::size_t>(c)];
    data.features.resize(n, spec.d);
    data.labels.resize(n);
    for (Index i = 0; i < n; ++i) {
      const bool true_minority = i < minority;
      const Scalar mean = true_minority ? half_sep : -half_sep;
      data.features(i, 0) = mean + rng.normal();
      for (int j = 1; j < spec.d; ++j) data.features(i, j) = rng.normal();
      // flip decision consumes a draw even when noise_rate is 0, so features
      // are invariant to noise_rate
      const Scalar margin = data.features(i, 0);
      const bool flip =
          rng.uniform01() < spec.noise_rate * std::exp(-spec.noise_decay * std::abs(margin));
      data.labels(i) = (true_minority != flip) ? 1.0 : 0.0;
    }
    out.per_client_minority_fraction[static_cast<std::size_t>(c)] = minority_fraction(data);
  }

  Rng rng(derive_seed({spec.seed, kTestTag}));
  out.test_set.features.resize(kTestSetSize, spec.d);
  out.test_set.labels.resize(kTestSetSize);
  for (Index i = 0; i < kTestSetSize; ++i) {
    const bool is_minority = rng.uniform01() < spec.minority_fraction;
    const Scalar mean = is_minority ? half_sep : -half_sep;
    out.test_set.features(i, 0) = mean + rng.normal();
    for (int j = 1; j < spec.d; ++j) out.test_set.features(i, j) = rng.normal();
    out.test_set.labels(i) = is_minority ? 1.0 : 0.0;
  }
  return out;
}

Scalar minority_fraction(const ClientDataset& data) {
  validate_dataset(data);
  return data.labels.mean();
}

Index FederatedDataset::total_examples() const {
  Index total = 0;
  for (const ClientDataset& c : clients) total += c.size();
  return total;
}

}  // namespace afl
