#pragma once

#include <cstdint>
#include <vector>

#include "afl/types.hpp"

namespace afl {

// Logistic-regression parameters: feature weights plus an explicit bias.
struct ModelParams {
  Vector weights;
  Scalar bias = 0.0;

  Index dim() const { return weights.size(); }
};

ModelParams zero_model(Index d);

// One client's examples. Labels are exactly 0 or 1; in generated data label 1
// is the globally-minority class.
struct ClientDataset {
  Matrix features;  // n x d
  Vector labels;    // n entries in {0, 1}

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

// Throws if rows/labels disagree, the set is empty, features are non-finite,
// or a label is not exactly 0 or 1.
void validate_dataset(const ClientDataset& data);

struct TrainConfig {
  static constexpr int kFullBatch = 0;

  Scalar learning_rate = 0.2;
  int local_epochs = 5;
  int batch_size = 32;  // examples per SGD step; kFullBatch = all of them
};

// sigma(w.x + b), evaluated in the overflow-safe form and nudged off 0 and 1
// so callers can take log(p) and log(1-p).
Scalar predict(const ModelParams& model, const Vector& x);

// Binary cross-entropy -[y log p + (1-y) log(1-p)] with p clamped to
// [1e-12, 1 - 1e-12].
Scalar per_example_loss(const ModelParams& model, const Vector& x, Scalar y);

// Row-wise losses for a whole client, same values as the scalar form.
Vector per_example_losses(const ModelParams& model, const ClientDataset& data);

// Gradient of the mean per-example loss over the batch with respect to
// (weights, bias); the bias slot is last.
Vector gradient(const ModelParams& model, const ClientDataset& batch);

// Mini-batch SGD: local_epochs passes, the seed controls batch shuffling.
// Pure function of its arguments; the input model is not modified.
ModelParams local_train(const ModelParams& model, const ClientDataset& data,
                        const TrainConfig& cfg, std::uint64_t seed);

struct WeightedModel {
  ModelParams model;
  Scalar weight = 0.0;  // client size n_k
};

// Entrywise weight-weighted mean of the models.
ModelParams fedavg_aggregate(const std::vector<WeightedModel>& updates);

// Fraction of examples classified correctly with threshold 0.5 (logit >= 0
// predicts label 1).
Scalar accuracy(const ModelParams& model, const ClientDataset& data);

}  // namespace afl
