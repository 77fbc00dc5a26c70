#pragma once

// Test-only oracles. Each one recomputes its quantity by a route independent
// of the implementation it checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "afl/model.hpp"

namespace testsupport {

// Weighted mean recomputed with extended-precision (long double) Kahan sums.
inline afl::ModelParams kahan_weighted_mean(const std::vector<afl::WeightedModel>& updates) {
  const afl::Index d = updates.front().model.dim();
  std::vector<long double> sums(static_cast<std::size_t>(d) + 1, 0.0L);
  std::vector<long double> comps(static_cast<std::size_t>(d) + 1, 0.0L);
  long double total = 0.0L;
  auto add = [&](std::size_t slot, long double value) {
    const long double y = value - comps[slot];
    const long double t = sums[slot] + y;
    comps[slot] = (t - sums[slot]) - y;
    sums[slot] = t;
  };
  for (const afl::WeightedModel& u : updates) {
    for (afl::Index j = 0; j < d; ++j) {
      add(static_cast<std::size_t>(j),
          static_cast<long double>(u.weight) * static_cast<long double>(u.model.weights(j)));
    }
    add(static_cast<std::size_t>(d),
        static_cast<long double>(u.weight) * static_cast<long double>(u.model.bias));
    total += static_cast<long double>(u.weight);
  }
  afl::ModelParams out;
  out.weights.resize(d);
  for (afl::Index j = 0; j < d; ++j) {
    out.weights(j) = static_cast<double>(sums[static_cast<std::size_t>(j)] / total);
  }
  out.bias = static_cast<double>(sums[static_cast<std::size_t>(d)] / total);
  return out;
}

// Central finite differences of the mean per-example loss over the batch.
inline afl::Vector finite_difference_gradient(const afl::ModelParams& model,
                                              const afl::ClientDataset& batch, double step) {
  const afl::Index d = model.dim();
  auto mean_loss = [&](const afl::ModelParams& m) {
    double total = 0.0;
    for (afl::Index i = 0; i < batch.size(); ++i) {
      const afl::Vector x = batch.features.row(i);
      total += afl::per_example_loss(m, x, batch.labels(i));
    }
    return total / static_cast<double>(batch.size());
  };
  afl::Vector g(d + 1);
  for (afl::Index j = 0; j <= d; ++j) {
    afl::ModelParams plus = model;
    afl::ModelParams minus = model;
    if (j < d) {
      plus.weights(j) += step;
      minus.weights(j) -= step;
    } else {
      plus.bias += step;
      minus.bias -= step;
    }
    g(j) = (mean_loss(plus) - mean_loss(minus)) / (2.0 * step);
  }
  return g;
}

namespace detail {
inline void inclusion_walk(const std::vector<double>& probs, std::vector<bool>& used,
                           double path_prob, double remaining_mass, int remaining_draws,
                           std::vector<double>& inclusion) {
  if (remaining_draws == 0) {
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (used[i]) inclusion[i] += path_prob;
    }
    return;
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (used[i] || probs[i] <= 0.0) continue;
    used[i] = true;
    inclusion_walk(probs, used, path_prob * probs[i] / remaining_mass,
                   remaining_mass - probs[i], remaining_draws - 1, inclusion);
    used[i] = false;
  }
}
}  // namespace detail

// Exact inclusion probabilities of sequential without-replacement sampling,
// by enumerating every ordered outcome.
inline std::vector<double> inclusion_probabilities(const std::vector<double>& probs, int m) {
  std::vector<double> inclusion(probs.size(), 0.0);
  std::vector<bool> used(probs.size(), false);
  const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  detail::inclusion_walk(probs, used, 1.0, mass, m, inclusion);
  return inclusion;
}

// Average ranks, ties shared.
inline std::vector<double> ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = shared;
    i = j + 1;
  }
  return out;
}

// Spearman rank correlation.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length samples");
  }
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

inline double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Type-7 (linear interpolation) quantile of an already-sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

}  // namespace testsupport
