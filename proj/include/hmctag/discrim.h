#ifndef HMCTAG_DISCRIM_H_
#define HMCTAG_DISCRIM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/features.h"

namespace hmctag {

// Multinomial logistic regression over sparse binary inputs.
//
// Weight rows are laid out as
//   [0, num_features)                      feature ids
//   [num_features, num_features + N)       previous-label one-hot (if conditioned)
//   last row                               bias
// and each row holds one weight per output label.
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::size_t num_features, std::size_t num_labels, bool conditions_on_previous);

  std::size_t num_features() const { return num_features_; }
  std::size_t num_labels() const { return weights_.cols(); }
  bool conditions_on_previous() const { return conditions_on_previous_; }

  std::size_t previous_row(LabelId prev) const { return num_features_ + static_cast<std::size_t>(prev); }
  std::size_t bias_row() const { return weights_.rows() - 1; }

  Table& weights() { return weights_; }
  const Table& weights() const { return weights_; }

  // Softmax distribution over labels. `prev` must be given iff the model
  // conditions on the previous label.
  std::vector<double> predict(const FeatureVector& features,
                              std::optional<LabelId> prev = std::nullopt) const;
  // Unnormalized scores, written into `scores` (size N).
  void scores(const FeatureVector& features, std::optional<LabelId> prev,
              std::span<double> scores) const;

  bool operator==(const LogisticModel&) const = default;

 private:
  std::size_t num_features_ = 0;
  bool conditions_on_previous_ = false;
  Table weights_;
};

struct TrainingExample {
  FeatureVector features;
  std::optional<LabelId> prev;
  LabelId target = 0;
};

struct SgdConfig {
  double learning_rate = 0.1;
  // rate at epoch e is learning_rate / (1 + decay * e)
  double decay = 0.05;
  int epochs = 20;
  double l2 = 1e-5;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;

  bool operator==(const SgdConfig&) const = default;
};

void validate(const SgdConfig& config);

struct LossAndGradient {
  double loss = 0.0;
  Table gradient;
};

// Mean negative log-likelihood over `batch` plus (l2 / 2) * ||W||^2, and its
// gradient with respect to every weight.
LossAndGradient loss_and_gradient(const LogisticModel& model,
                                  std::span<const TrainingExample> batch, double l2);

// Mean negative log-likelihood only (no regularizer).
double mean_log_loss(const LogisticModel& model, std::span<const TrainingExample> data);

// Mini-batch SGD from zero weights. Bitwise deterministic for a fixed seed
// and dataset order.
LogisticModel train(std::span<const TrainingExample> data, std::size_t num_features,
                    std::size_t num_labels, bool conditions_on_previous, const SgdConfig& config);

}  // namespace hmctag

#endif  // HMCTAG_DISCRIM_H_
