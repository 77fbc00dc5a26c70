#pragma once

#include <cstdint>
#include <vector>

#include "afl/model.hpp"
#include "afl/types.hpp"

namespace afl {

// Two unit-variance Gaussian clusters whose means sit separation apart along
// the first axis, so the signed margin of a point is just its first
// coordinate. Labels flip with probability noise_rate * exp(-noise_decay *
// |margin|), and the minority mass is spread unevenly across clients.
struct SyntheticSpec {
  int d = 10;
  int num_clients = 100;            // K
  int n_min = 20;                   // client size range, inclusive
  int n_max = 200;
  Scalar minority_fraction = 0.05;  // global fraction of label-1 examples
  Scalar separation = 0.8;          // distance between class means, in class sd units
  Scalar noise_rate = 0.2;          // eta0: flip probability on the boundary
  Scalar noise_decay = 2.0;         // lambda
  Scalar skew = 1.5;                // 0 = every client at the global fraction
  std::uint64_t seed = 1;
};

void validate_spec(const SyntheticSpec& spec);

struct FederatedDataset {
  std::vector<ClientDataset> clients;
  ClientDataset test_set;  // fresh noiseless draws from the global mixture
  std::vector<Scalar> per_client_minority_fraction;

  int num_clients() const { return static_cast<int>(clients.size()); }
  Index total_examples() const;
};

// Deterministic per spec (bit-identical for equal specs). Feature draws do
// not depend on noise_rate, so two specs differing only in noise_rate produce
// the same points with different labels.
FederatedDataset generate(const SyntheticSpec& spec);

// Fraction of examples carrying the minority label (1).
Scalar minority_fraction(const ClientDataset& data);

inline constexpr int kTestSetSize = 2000;

}  // namespace afl
