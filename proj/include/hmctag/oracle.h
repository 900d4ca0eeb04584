#ifndef HMCTAG_ORACLE_H_
#define HMCTAG_ORACLE_H_

// Brute-force reference computations by path enumeration. Test use only;
// nothing here calls into the forward/backward engines.

#include <cstddef>
#include <span>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/hmc.h"
#include "hmctag/memm.h"

namespace hmctag::oracle {

// Largest number of label paths the enumerators will visit.
inline constexpr double kMaxPaths = 1e7;

// pi_{x1} b_{x1}(y1) prod_t a_{x_{t-1} x_t} b_{x_t}(y_t).
double joint_probability(const HmcParams& params, std::span<const LabelId> labels,
                         std::span<const WordId> obs);

// Same joint over an explicit T x N emission-likelihood matrix.
double joint_probability(const HmcParams& params, std::span<const LabelId> labels,
                         const Table& likelihoods);

// Sum of the joint over all N^T paths.
double observation_probability(const HmcParams& params, std::span<const WordId> obs);

// Posterior marginals by summing the joint over all N^T paths. Throws
// InvalidInput when N^T exceeds kMaxPaths.
PosteriorLattice posterior_bruteforce(const HmcParams& params, std::span<const WordId> obs);
PosteriorLattice posterior_bruteforce(const HmcParams& params, const Table& likelihoods);

// Raw (unscaled) forward and backward values by enumeration:
//   alpha(t, i) = sum over x_{1:t} with x_t = i of the joint of y_{1:t}
//   beta(t, i)  = sum over x_{t+1:T} of p(y_{t+1:T}, x_{t+1:T} | x_t = i)
Table forward_bruteforce(const HmcParams& params, std::span<const WordId> obs);
Table backward_bruteforce(const HmcParams& params, std::span<const WordId> obs);

// L_y(i) = pi_i b_i(y) / sum_j pi_j b_j(y) for each observation: the exact
// discriminative posterior a generative chain implies.
Table exact_l_values(const HmcParams& params, std::span<const WordId> obs);

// P(X_t = i | y_{1:t}) under the MEMM chain, enumerating label prefixes.
Table memm_posterior_bruteforce(const MemmTables& tables);

}  // namespace hmctag::oracle

#endif  // HMCTAG_ORACLE_H_
