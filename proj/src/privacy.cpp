#include "afl/privacy.hpp"

#include <cmath>
#include <stdexcept>

#include "afl/rng.hpp"

namespace afl {

Vector clip_per_example_losses(const Vector& losses, Scalar clip_bound) {
  if (!(clip_bound > 0.0)) throw std::invalid_argument("clip_per_example_losses: bound must be positive");
  return losses.cwiseMin(clip_bound);
}

Scalar laplace_from_uniform(Scalar u, Scalar scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_from_uniform: scale must be positive");
  if (!(u > -0.5 && u < 0.5)) throw std::invalid_argument("laplace_from_uniform: u must be in (-1/2, 1/2)");
  const Scalar sign = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

Scalar laplace_noise(Scalar scale, std::uint64_t seed) {
  Rng rng(seed);
  return laplace_from_uniform(rng.uniform_open01() - 0.5, scale);
}

Scalar privatize_valuation(Scalar raw, ValueKind kind, Index data_size,
                           const PrivacyConfig& cfg, std::uint64_t seed) {
  if (!cfg.enabled) {
    throw std::invalid_argument("privatize_valuation: privacy is disabled, caller must bypass");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("privacy.epsilon: must be positive");
  Scalar sensitivity = 1.0;
  if (kind == ValueKind::kLoss) {
    if (data_size < 1) throw std::invalid_argument("privatize_valuation: data_size must be >= 1");
    if (!(cfg.clip_bound > 0.0)) throw ConfigError("privacy.clip_bound: must be positive");
    sensitivity = cfg.clip_bound / std::sqrt(static_cast<Scalar>(data_size));
  }
  return raw + laplace_noise(sensitivity / cfg.epsilon, seed);
}

}  // namespace afl
