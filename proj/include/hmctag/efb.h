#ifndef HMCTAG_EFB_H_
#define HMCTAG_EFB_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/discrim.h"
#include "hmctag/features.h"
#include "hmctag/hmc.h"

namespace hmctag {

// Floor applied to discriminative probabilities before the L / pi ratio.
inline constexpr double kProbabilityFloor = 1e-300;

// Prior and transitions of a stationary chain; observations enter only
// through L_t(i) = P(X_t = i | y_t).
struct EfbParams {
  std::vector<double> pi;
  Table trans;

  std::size_t num_labels() const { return pi.size(); }
  bool operator==(const EfbParams&) const = default;
};

// Returns L_{y_t} for position t of the sentence being decoded.
using LProvider = std::function<std::vector<double>(std::size_t position)>;

// T x N table of L values gathered from `provider`.
Table collect_l_values(const LProvider& provider, std::size_t length, std::size_t num_labels);

// Entropic forward: alpha_1 = L_1, alpha_{t+1}(i) = L_{t+1}(i) / pi_i * sum_j alpha_t(j) a_ji.
// Throws InvalidInput if some pi_i is not positive.
ScaledRecursion entropic_forward(const EfbParams& params, const Table& l_values);

// Entropic backward: beta_T = 1, beta_t(i) = sum_j L_{t+1}(j) / pi_j * beta_{t+1}(j) a_ij.
ScaledRecursion entropic_backward(const EfbParams& params, const Table& l_values);

PosteriorLattice posterior_efb(const EfbParams& params, const Table& l_values);
PosteriorLattice posterior_efb(const EfbParams& params, const LProvider& provider,
                               std::size_t length);

// Features -> L from `model` -> posterior -> per-position argmax.
std::vector<LabelId> decode_efb(const EfbParams& params, const LogisticModel& model,
                                const FeaturePipeline& pipeline,
                                std::span<const std::string> tokens);

}  // namespace hmctag

#endif  // HMCTAG_EFB_H_
