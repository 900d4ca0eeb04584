#ifndef HMCTAG_HMC_H_
#define HMCTAG_HMC_H_

#include <cstddef>
#include <span>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/features.h"

namespace hmctag {

inline constexpr double kDefaultSmoothing = 1e-6;

// Stationary hidden Markov chain parameters.
//   pi[i]       = P(X_t = i)
//   trans(i, j) = P(X_{t+1} = j | X_t = i)
//   emit(i, y)  = P(Y_t = y | X_t = i); the last column is the unknown word.
struct HmcParams {
  std::vector<double> pi;
  Table trans;
  Table emit;

  std::size_t num_labels() const { return pi.size(); }
  bool operator==(const HmcParams&) const = default;
};

// Throws InvalidInput if any stochasticity invariant is off by more than `tol`.
void validate(const HmcParams& params, double tol = 1e-12);

// Supervised frequency-count estimate with additive smoothing `delta`.
// pi counts every position, transitions never cross sentence boundaries,
// and emit gets one extra delta-only column for unknown words.
HmcParams estimate_params(const TaggedCorpus& corpus, double delta = kDefaultSmoothing);

// Output of a scaled forward or backward pass. Row t of `normalized` sums to
// one; `scales[t]` is the divisor applied at step t. unscaled(t, i) recovers
// the raw recursion value.
struct ScaledRecursion {
  Table normalized;
  std::vector<double> scales;
  // log of the factor that maps row t of `normalized` back to raw values.
  std::vector<double> log_multiplier;

  double unscaled(std::size_t t, std::size_t i) const;
  // Sum of log(scales); for a forward pass this is log p(y_{1:T}).
  double log_scale_sum() const;
};

// T x N matrix of emission likelihoods b_i(y_t).
Table emission_matrix(const HmcParams& params, std::span<const WordId> obs);

// Forward/backward recursions over an arbitrary T x N likelihood matrix.
ScaledRecursion forward(const HmcParams& params, const Table& likelihoods);
ScaledRecursion backward(const HmcParams& params, const Table& likelihoods);

ScaledRecursion forward(const HmcParams& params, std::span<const WordId> obs);
ScaledRecursion backward(const HmcParams& params, std::span<const WordId> obs);

// Normalized alpha*beta per position.
PosteriorLattice combine_posterior(const ScaledRecursion& fwd, const ScaledRecursion& bwd);

PosteriorLattice posterior_fb(const HmcParams& params, const Table& likelihoods);
PosteriorLattice posterior_fb(const HmcParams& params, std::span<const WordId> obs);

// Emission under the feature-independence assumption: the product over
// feature families of P(Y^k = v | X = i).
class NaiveFeatureEmission {
 public:
  NaiveFeatureEmission() = default;

  // Counts (family value, label) pairs in `corpus` under `pipeline`, with
  // additive smoothing; each family's unknown slot receives delta only.
  static NaiveFeatureEmission estimate(const TaggedCorpus& corpus, const FeaturePipeline& pipeline,
                                       double delta = kDefaultSmoothing);

  // Builds directly from per-id conditional tables: probs(i, id) for every
  // feature id of `index`. Each family's slice of a row must sum to one.
  NaiveFeatureEmission(const FeatureIndex& index, Table probs);

  double emission(const FeatureVector& features, LabelId label) const;
  Table likelihoods(std::span<const FeatureVector> sentence) const;

  std::size_t num_labels() const { return probs_.rows(); }
  const Table& probs() const { return probs_; }
  const std::vector<Family>& family_of_id() const { return family_of_id_; }

  bool operator==(const NaiveFeatureEmission&) const = default;

 private:
  // probs_(i, id): P(family(id) takes the value `id` | X = i).
  Table probs_;
  std::vector<Family> family_of_id_;
};

}  // namespace hmctag

#endif  // HMCTAG_HMC_H_
