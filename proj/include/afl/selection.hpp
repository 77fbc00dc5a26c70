#pragma once

#include <cstdint>
#include <vector>

#include "afl/types.hpp"
#include "afl/valuation.hpp"

namespace afl {

enum class PolicyKind { kUniform, kAfl };

struct SelectionPolicy {
  PolicyKind kind = PolicyKind::kAfl;
  Scalar temperature = 1.0;    // alpha: softmax sharpness over valuations
  Scalar uniform_mix = 0.1;    // epsilon: uniform floor, keeps every client live
  int clients_per_round = 10;  // m
};

struct SamplingDistribution {
  Vector probs;

  int num_clients() const { return static_cast<int>(probs.size()); }
};

// uniform: 1/K everywhere. afl: (1 - eps) * softmax(alpha * v) + eps / K,
// softmax computed with max subtraction.
SamplingDistribution to_sampling_distribution(const ValuationTable& table,
                                              const SelectionPolicy& policy);

// Sequential sampling without replacement: draw one client, zero its mass,
// renormalize, repeat. Returns m distinct ids in draw order, deterministic
// per seed.
std::vector<int> sample_clients(const SamplingDistribution& dist, int m,
                                std::uint64_t seed);

// Id with the largest valuation; ties go to the smallest id.
int argmax_client(const ValuationTable& table);

}  // namespace afl
