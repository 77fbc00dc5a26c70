#pragma once

#include <cstdint>

#include "afl/types.hpp"
#include "afl/valuation.hpp"

namespace afl {

struct PrivacyConfig {
  bool enabled = false;
  Scalar epsilon = 1.0;     // per-release budget
  Scalar clip_bound = 2.0;  // C, applies to the loss valuation only
};

// Entrywise min(loss, clip_bound).
Vector clip_per_example_losses(const Vector& losses, Scalar clip_bound);

// Inverse-CDF transform of u in (-1/2, 1/2) to Laplace(0, scale); u = 0 maps
// to the median 0.
Scalar laplace_from_uniform(Scalar u, Scalar scale);

// Seeded Laplace(0, scale) draw.
Scalar laplace_noise(Scalar scale, std::uint64_t seed);

// raw + Laplace(sensitivity / epsilon). Sensitivity is 1 for the count
// valuation and clip_bound / sqrt(n_k) for a loss valuation built from
// clipped per-example losses, treating n_k as public. The release is never
// clamped: negative or out-of-range values must be passed through.
Scalar privatize_valuation(Scalar raw, ValueKind kind, Index data_size,
                           const PrivacyConfig& cfg, std::uint64_t seed);

}  // namespace afl
