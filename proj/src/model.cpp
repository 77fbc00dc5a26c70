#include "afl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "afl/rng.hpp"

namespace afl {

namespace {

constexpr Scalar kLossClamp = 1e-12;

Scalar logistic(Scalar z) {
  if (z >= 0.0) {
    const Scalar e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const Scalar e = std::exp(z);
  return e / (1.0 + e);
}

// Smallest clamp that keeps the result strictly inside (0, 1).
Scalar open_unit_clamp(Scalar p) {
  static const Scalar lo = std::numeric_limits<Scalar>::min();
  static const Scalar hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

Scalar predict_logit(const ModelParams& model, const Vector& x) {
  if (x.size() != model.dim()) {
    throw DimensionError("predict: feature vector has length " +
                         std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.dim()));
  }
  if (!x.allFinite()) throw NumericError("predict: non-finite feature vector");
  return model.weights.dot(x) + model.bias;
}

Scalar loss_from_probability(Scalar p, Scalar y) {
  p = std::clamp(p, kLossClamp, 1.0 - kLossClamp);
  return y == 1.0 ? -std::log(p) : -std::log(1.0 - p);
}

void check_label(Scalar y) {
  if (y != 0.0 && y != 1.0) {
    throw std::invalid_argument("label must be exactly 0 or 1, got " + std::to_string(y));
  }
}

// Gradient of the mean loss, no input validation. Batch rows are materialized
// so the scalar and batched paths round identically.
Vector gradient_unchecked(const ModelParams& model, const Matrix& features,
                          const Vector& labels) {
  const Index n = features.rows();
  const Index d = features.cols();
  Vector g = Vector::Zero(d + 1);
  Vector xi(d);
  for (Index i = 0; i < n; ++i) {
    xi = features.row(i);
    const Scalar p = open_unit_clamp(logistic(model.weights.dot(xi) + model.bias));
    const Scalar r = p - labels(i);
    g.head(d) += r * xi;
    g(d) += r;
  }
  g /= static_cast<Scalar>(n);
  return g;
}

void shuffle_indices(std::vector<Index>& idx, Rng& rng) {
  for (Index i = static_cast<Index>(idx.size()) - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
}

}  // namespace

ModelParams zero_model(Index d) { return ModelParams{Vector::Zero(d), 0.0}; }

void validate_dataset(const ClientDataset& data) {
  if (data.features.rows() == 0) throw std::invalid_argument("dataset is empty");
  if (data.labels.size() != data.features.rows()) {
    throw DimensionError("dataset has " + std::to_string(data.features.rows()) +
                         " feature rows but " + std::to_string(data.labels.size()) +
                         " labels");
  }
  if (!data.features.allFinite()) throw NumericError("dataset has non-finite features");
  for (Index i = 0; i < data.labels.size(); ++i) check_label(data.labels(i));
}

Scalar predict(const ModelParams& model, const Vector& x) {
  return open_unit_clamp(logistic(predict_logit(model, x)));
}

Scalar per_example_loss(const ModelParams& model, const Vector& x, Scalar y) {
  check_label(y);
  return loss_from_probability(predict(model, x), y);
}

Vector per_example_losses(const ModelParams& model, const ClientDataset& data) {
  validate_dataset(data);
  if (data.dim() != model.dim()) {
    throw DimensionError("per_example_losses: dataset dimension " +
                         std::to_string(data.dim()) + " does not match model dimension " +
                         std::to_string(model.dim()));
  }
  const Index n = data.size();
  Vector losses(n);
  Vector xi(data.dim());
  for (Index i = 0; i < n; ++i) {
    xi = data.features.row(i);
    losses(i) = loss_from_probability(open_unit_clamp(logistic(model.weights.dot(xi) + model.bias)),
                                      data.labels(i));
  }
  return losses;
}

Vector gradient(const ModelParams& model, const ClientDataset& batch) {
  validate_dataset(batch);
  if (batch.dim() != model.dim()) {
    throw DimensionError("gradient: dataset dimension " + std::to_string(batch.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
  }
  return gradient_unchecked(model, batch.features, batch.labels);
}

ModelParams local_train(const ModelParams& model, const ClientDataset& data,
                        const TrainConfig& cfg, std::uint64_t seed) {
  validate_dataset(data);
  if (data.dim() != model.dim()) {
    throw DimensionError("local_train: dataset dimension " + std::to_string(data.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
  }
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("local_train: learning_rate must be positive");
  if (cfg.local_epochs < 1) throw std::invalid_argument("local_train: local_epochs must be >= 1");
  if (cfg.batch_size < 0) throw std::invalid_argument("local_train: batch_size must be positive or full");

  const Index n = data.size();
  const Index d = data.dim();
  const Index batch = cfg.batch_size == TrainConfig::kFullBatch
                          ? n
                          : std::min<Index>(cfg.batch_size, n);

  ModelParams current = model;
  Rng rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  Matrix bx(batch, d);
  Vector by(batch);
  for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    if (batch < n) shuffle_indices(order, rng);
    for (Index start = 0; start < n; start += batch) {
      const Index count = std::min(batch, n - start);
      for (Index i = 0; i < count; ++i) {
        bx.row(i) = data.features.row(order[static_cast<std::size_t>(start + i)]);
        by(i) = data.labels(order[static_cast<std::size_t>(start + i)]);
      }
      const Vector g = count == batch
                           ? gradient_unchecked(current, bx, by)
                           : gradient_unchecked(current, bx.topRows(count), by.head(count));
      if (!g.allFinite()) throw NumericError("local_train: non-finite gradient");
      current.weights -= cfg.learning_rate * g.head(d);
      current.bias -= cfg.learning_rate * g(d);
    }
  }
  return current;
}

ModelParams fedavg_aggregate(const std::vector<WeightedModel>& updates) {
  if (updates.empty()) throw std::invalid_argument("fedavg_aggregate: no updates");
  const Index d = updates.front().model.dim();
  Vector weights = Vector::Zero(d);
  Scalar bias = 0.0;
  Scalar total = 0.0;
  for (const WeightedModel& u : updates) {
    if (u.model.dim() != d) {
      throw DimensionError("fedavg_aggregate: mixed model dimensions " +
                           std::to_string(u.model.dim()) + " and " + std::to_string(d));
    }
    if (u.weight <= 0.0) throw std::invalid_argument("fedavg_aggregate: weights must be positive");
    weights += u.weight * u.model.weights;
    bias += u.weight * u.model.bias;
    total += u.weight;
  }
  ModelParams out{weights / total, bias / total};
  if (!out.weights.allFinite() || !std::isfinite(out.bias)) {
    throw NumericError("fedavg_aggregate: non-finite aggregate");
  }
  return out;
}

Scalar accuracy(const ModelParams& model, const ClientDataset& data) {
  validate_dataset(data);
  if (data.dim() != model.dim()) {
    throw DimensionError("accuracy: dataset dimension " + std::to_string(data.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
  }
  const Index n = data.size();
  Index correct = 0;
  Vector xi(data.dim());
  for (Index i = 0; i < n; ++i) {
    xi = data.features.row(i);
    const bool predict_one = model.weights.dot(xi) + model.bias >= 0.0;
    if (predict_one == (data.labels(i) == 1.0)) ++correct;
  }
  return static_cast<Scalar>(correct) / static_cast<Scalar>(n);
}

}  // namespace afl
