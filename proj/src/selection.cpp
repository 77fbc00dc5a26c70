#include "afl/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "afl/rng.hpp"

namespace afl {

SamplingDistribution to_sampling_distribution(const ValuationTable& table,
                                              const SelectionPolicy& policy) {
  const int k = table.num_clients();
  if (k < 1) throw std::invalid_argument("to_sampling_distribution: empty table");
  const Scalar uniform = 1.0 / static_cast<Scalar>(k);

  if (policy.kind == PolicyKind::kUniform) {
    return SamplingDistribution{Vector::Constant(k, uniform)};
  }

  Vector z(k);
  for (int i = 0; i < k; ++i) {
    z(i) = policy.temperature * table.entries[static_cast<std::size_t>(i)].value;
  }
  z.array() -= z.maxCoeff();
  const Vector e = z.array().exp();
  const Scalar mix = policy.uniform_mix;
  Vector probs = (1.0 - mix) * (e / e.sum());
  probs.array() += mix * uniform;
  return SamplingDistribution{std::move(probs)};
}

std::vector<int> sample_clients(const SamplingDistribution& dist, int m, std::uint64_t seed) {
  const int k = dist.num_clients();
  if (m < 1 || m > k) {
    throw ConfigError("sample_clients: m must be in [1, " + std::to_string(k) + "], got " +
                      std::to_string(m));
  }
  const int positive = static_cast<int>((dist.probs.array() > 0.0).count());
  if (m > positive) {
    throw ConfigError("sample_clients: only " + std::to_string(positive) +
                      " clients have positive probability, cannot draw " + std::to_string(m));
  }

  Vector mass = dist.probs;
  Scalar remaining = mass.sum();
  Rng rng(seed);
  std::vector<int> drawn;
  drawn.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Scalar u = rng.uniform01() * remaining;
    Scalar cum = 0.0;
    int pick = -1;
    int last_positive = -1;
    for (int i = 0; i < k; ++i) {
      if (mass(i) <= 0.0) continue;
      last_positive = i;
      cum += mass(i);
      if (u < cum) {
        pick = i;
        break;
      }
    }
    if (pick < 0) pick = last_positive;  // u landed on trailing rounding error
    drawn.push_back(pick);
    remaining -= mass(pick);
    mass(pick) = 0.0;
  }
  return drawn;
}

int argmax_client(const ValuationTable& table) {
  if (table.num_clients() < 1) throw std::invalid_argument("argmax_client: empty table");
  int best = 0;
  for (int i = 1; i < table.num_clients(); ++i) {
    if (table.entries[static_cast<std::size_t>(i)].value >
        table.entries[static_cast<std::size_t>(best)].value) {
      best = i;
    }
  }
  return best;
}

}  // namespace afl
