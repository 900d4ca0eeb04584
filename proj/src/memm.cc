#include "hmctag/memm.h"

#include <string>

#include "hmctag/error.h"

namespace hmctag {

MemmTables memm_tables(const MemmModel& model, std::span<const FeatureVector> features) {
  if (!model.next.conditions_on_previous() || model.first.conditions_on_previous())
    throw InvalidInput("MEMM needs an unconditioned first model and a conditioned transition model");
  if (model.first.num_labels() != model.next.num_labels())
    throw InvalidInput("MEMM models disagree on the label count");
  MemmTables tables;
  if (features.empty()) return tables;
  const std::size_t n = model.first.num_labels();
  tables.first = model.first.predict(features[0]);
  tables.steps.reserve(features.size() - 1);
  for (std::size_t t = 1; t < features.size(); ++t) {
    Table step(n, n);
    for (std::size_t prev = 0; prev < n; ++prev) {
      const auto p = model.next.predict(features[t], static_cast<LabelId>(prev));
      std::copy(p.begin(), p.end(), step.row(prev).begin());
    }
    tables.steps.push_back(std::move(step));
  }
  return tables;
}

Table memm_forward(const MemmTables& tables) {
  const std::size_t n = tables.first.size();
  if (n == 0) throw InvalidInput("empty MEMM input");
  Table alpha(tables.steps.size() + 1, n);
  std::copy(tables.first.begin(), tables.first.end(), alpha.row(0).begin());
  for (std::size_t t = 1; t < alpha.rows(); ++t) {
    const Table& step = tables.steps[t - 1];
    if (step.rows() != n || step.cols() != n)
      throw InvalidInput("MEMM step table at position " + std::to_string(t) + " is not N x N");
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += alpha(t - 1, j) * step(j, i);
      alpha(t, i) = sum;
    }
  }
  return alpha;
}

Table memm_forward(const MemmModel& model, std::span<const FeatureVector> features) {
  if (features.empty()) throw InvalidInput("empty observation sequence");
  return memm_forward(memm_tables(model, features));
}

std::vector<LabelId> decode_memm(const MemmModel& model, const FeaturePipeline& pipeline,
                                 std::span<const std::string> tokens) {
  if (tokens.empty()) return {};
  const Table alpha = memm_forward(model, pipeline.apply(tokens));
  std::vector<LabelId> out;
  out.reserve(alpha.rows());
  for (std::size_t t = 0; t < alpha.rows(); ++t) out.push_back(argmax(alpha.row(t)));
  return out;
}

}  // namespace hmctag
