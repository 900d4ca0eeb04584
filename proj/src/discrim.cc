#include "hmctag/discrim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hmctag/error.h"

namespace hmctag {

namespace {

void softmax_in_place(std::span<double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

void check_example(const LogisticModel& model, const TrainingExample& ex) {
  if (ex.target < 0 || static_cast<std::size_t>(ex.target) >= model.num_labels())
    throw InvalidInput("training target out of range: " + std::to_string(ex.target));
}

// Weight rows touched by one input.
template <typename Fn>
void for_each_active_row(const LogisticModel& model, const FeatureVector& features,
                         std::optional<LabelId> prev, Fn&& fn) {
  for (const auto& f : features.active) fn(static_cast<std::size_t>(f.id));
  if (prev) fn(model.previous_row(*prev));
  fn(model.bias_row());
}

}  // namespace

LogisticModel::LogisticModel(std::size_t num_features, std::size_t num_labels,
                             bool conditions_on_previous)
    : num_features_(num_features),
      conditions_on_previous_(conditions_on_previous),
      weights_(num_features + (conditions_on_previous ? num_labels : 0) + 1, num_labels, 0.0) {
  if (num_labels == 0) throw InvalidInput("logistic model needs at least one label");
}

void LogisticModel::scores(const FeatureVector& features, std::optional<LabelId> prev,
                           std::span<double> out) const {
  if (prev.has_value() != conditions_on_previous_)
    throw InvalidInput(conditions_on_previous_ ? "model requires a previous label"
                                               : "model does not condition on a previous label");
  if (prev && (*prev < 0 || static_cast<std::size_t>(*prev) >= num_labels()))
    throw InvalidInput("previous label out of range: " + std::to_string(*prev));
  for (const auto& f : features.active)
    if (f.id >= num_features_) throw InvalidInput("feature id out of range: " + std::to_string(f.id));

  std::fill(out.begin(), out.end(), 0.0);
  for_each_active_row(*this, features, prev, [&](std::size_t r) {
    const auto row = weights_.row(r);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
  });
}

std::vector<double> LogisticModel::predict(const FeatureVector& features,
                                           std::optional<LabelId> prev) const {
  std::vector<double> p(num_labels());
  scores(features, prev, p);
  softmax_in_place(p);
  return p;
}

void validate(const SgdConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
    throw InvalidInput("learning rate must be positive");
  if (config.epochs < 1) throw InvalidInput("epochs must be at least 1");
  if (!(config.decay >= 0.0)) throw InvalidInput("learning-rate decay must be non-negative");
  if (!(config.l2 >= 0.0)) throw InvalidInput("L2 strength must be non-negative");
  if (config.learning_rate * config.l2 >= 1.0) throw InvalidInput("learning rate * L2 must be below 1");
  if (config.batch_size == 0) throw InvalidInput("batch size must be positive");
}

LossAndGradient loss_and_gradient(const LogisticModel& model,
                                  std::span<const TrainingExample> batch, double l2) {
  const Table& w = model.weights();
  LossAndGradient out{0.0, Table(w.rows(), w.cols(), 0.0)};
  std::vector<double> p(model.num_labels());
  const double inv = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    check_example(model, ex);
    model.scores(ex.features, ex.prev, p);
    softmax_in_place(p);
    out.loss -= std::log(p[ex.target]) * inv;
    p[ex.target] -= 1.0;
    for_each_active_row(model, ex.features, ex.prev, [&](std::size_t r) {
      auto g = out.gradient.row(r);
      for (std::size_t j = 0; j < p.size(); ++j) g[j] += p[j] * inv;
    });
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < w.data().size(); ++k) {
    sq += w.data()[k] * w.data()[k];
    out.gradient.data()[k] += l2 * w.data()[k];
  }
  out.loss += 0.5 * l2 * sq;
  return out;
}

double mean_log_loss(const LogisticModel& model, std::span<const TrainingExample> data) {
  if (data.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& ex : data) {
    check_example(model, ex);
    loss -= std::log(model.predict(ex.features, ex.prev)[ex.target]);
  }
  return loss / static_cast<double>(data.size());
}

LogisticModel train(std::span<const TrainingExample> data, std::size_t num_features,
                    std::size_t num_labels, bool conditions_on_previous, const SgdConfig& config) {
  validate(config);
  if (data.empty()) throw InvalidInput("cannot train on an empty dataset");
  LogisticModel model(num_features, num_labels, conditions_on_previous);
  for (const auto& ex : data) check_example(model, ex);

  // Effective weights are scale * weights(); L2 decay only touches the scale
  // so each step updates just the rows active in the batch.
  Table& w = model.weights();
  double scale = 1.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  std::vector<double> residuals;
  std::vector<double> p(num_labels);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double rate = config.learning_rate / (1.0 + config.decay * epoch);
    // Fisher-Yates with the raw engine output keeps the order portable.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double inv = 1.0 / static_cast<double>(end - begin);

      residuals.assign((end - begin) * num_labels, 0.0);
      for (std::size_t b = begin; b < end; ++b) {
        const auto& ex = data[order[b]];
        model.scores(ex.features, ex.prev, p);
        for (double& s : p) s *= scale;
        softmax_in_place(p);
        p[ex.target] -= 1.0;
        std::copy(p.begin(), p.end(), residuals.begin() + (b - begin) * num_labels);
      }

      scale *= 1.0 - rate * config.l2;
      const double step = rate * inv / scale;
      for (std::size_t b = begin; b < end; ++b) {
        const auto& ex = data[order[b]];
        const double* r = residuals.data() + (b - begin) * num_labels;
        for_each_active_row(model, ex.features, ex.prev, [&](std::size_t row) {
          auto wr = w.row(row);
          for (std::size_t j = 0; j < num_labels; ++j) wr[j] -= step * r[j];
        });
      }

      if (scale < 1e-8) {
        for (double& v : w.data()) v *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& v : w.data()) v *= scale;
  return model;
}

}  // namespace hmctag
