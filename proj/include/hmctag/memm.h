#ifndef HMCTAG_MEMM_H_
#define HMCTAG_MEMM_H_

#include <span>
#include <string>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/discrim.h"
#include "hmctag/features.h"

namespace hmctag {

struct MemmModel {
  LogisticModel first;  // P(X_1 = i | y_1)
  LogisticModel next;   // P(X_{t+1} = l | X_t = i, y_{t+1})

  bool operator==(const MemmModel&) const = default;
};

// Explicit per-sentence tables: first[i] = L_{y_1}(i) and, for t >= 1,
// steps[t - 1](prev, next) = L1_{y_{t+1}}(next | prev).
struct MemmTables {
  std::vector<double> first;
  std::vector<Table> steps;
};

MemmTables memm_tables(const MemmModel& model, std::span<const FeatureVector> features);

// alpha_1 = L_{y_1}; alpha_{t+1}(i) = sum_j alpha_t(j) L1_{y_{t+1}}(i | j).
// Rows are filtered distributions P(X_t = i | y_{1:t}); nothing is rescaled.
Table memm_forward(const MemmTables& tables);
Table memm_forward(const MemmModel& model, std::span<const FeatureVector> features);

std::vector<LabelId> decode_memm(const MemmModel& model, const FeaturePipeline& pipeline,
                                 std::span<const std::string> tokens);

}  // namespace hmctag

#endif  // HMCTAG_MEMM_H_
