#include "hmctag/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmctag/error.h"

namespace hmctag::oracle {

namespace {

// Below this many factors per path, joints are plain products.
constexpr std::size_t kRawProductBound = 200;

void check_path_count(std::size_t n, std::size_t length) {
  if (std::pow(static_cast<double>(n), static_cast<double>(length)) > kMaxPaths)
    throw InvalidInput("brute force refused: " + std::to_string(n) + "^" + std::to_string(length) +
                       " paths");
}

// Advances `labels` to the next path in lexicographic order; false on wrap.
bool next_path(std::vector<LabelId>& labels, std::size_t n) {
  for (std::size_t k = labels.size(); k-- > 0;) {
    if (static_cast<std::size_t>(++labels[k]) < n) return true;
    labels[k] = 0;
  }
  return false;
}

Table likelihoods_of(const HmcParams& params, std::span<const WordId> obs) {
  Table lik(obs.size(), params.num_labels());
  for (std::size_t t = 0; t < obs.size(); ++t)
    for (std::size_t i = 0; i < params.num_labels(); ++i)
      lik(t, i) = params.emit(i, static_cast<std::size_t>(obs[t]));
  return lik;
}

double log_joint(const HmcParams& params, std::span<const LabelId> labels, const Table& lik) {
  double lp = std::log(params.pi[labels[0]]) + std::log(lik(0, labels[0]));
  for (std::size_t t = 1; t < labels.size(); ++t)
    lp += std::log(params.trans(labels[t - 1], labels[t])) + std::log(lik(t, labels[t]));
  return lp;
}

void normalize_rows(Table& table) {
  for (std::size_t t = 0; t < table.rows(); ++t) {
    double sum = 0.0;
    for (double v : table.row(t)) sum += v;
    if (!(sum > 0.0)) throw InvalidInput("brute-force marginal is zero at position " + std::to_string(t));
    for (double& v : table.row(t)) v /= sum;
  }
}

}  // namespace

double joint_probability(const HmcParams& params, std::span<const LabelId> labels,
                         const Table& likelihoods) {
  if (labels.empty() || labels.size() != likelihoods.rows())
    throw InvalidInput("label path and observations differ in length");
  double p = params.pi[labels[0]] * likelihoods(0, labels[0]);
  for (std::size_t t = 1; t < labels.size(); ++t)
    p *= params.trans(labels[t - 1], labels[t]) * likelihoods(t, labels[t]);
  return p;
}

double joint_probability(const HmcParams& params, std::span<const LabelId> labels,
                         std::span<const WordId> obs) {
  return joint_probability(params, labels, likelihoods_of(params, obs));
}

double observation_probability(const HmcParams& params, std::span<const WordId> obs) {
  const Table lik = likelihoods_of(params, obs);
  check_path_count(params.num_labels(), obs.size());
  std::vector<LabelId> labels(obs.size(), 0);
  double total = 0.0;
  do {
    total += joint_probability(params, labels, lik);
  } while (next_path(labels, params.num_labels()));
  return total;
}

PosteriorLattice posterior_bruteforce(const HmcParams& params, const Table& likelihoods) {
  const std::size_t n = params.num_labels();
  const std::size_t length = likelihoods.rows();
  if (length == 0) throw InvalidInput("empty observation sequence");
  check_path_count(n, length);

  Table marginals(length, n, 0.0);
  std::vector<LabelId> labels(length, 0);
  if (length * n <= kRawProductBound) {
    do {
      const double p = joint_probability(params, labels, likelihoods);
      for (std::size_t t = 0; t < length; ++t) marginals(t, labels[t]) += p;
    } while (next_path(labels, n));
  } else {
    double top = -std::numeric_limits<double>::infinity();
    do {
      top = std::max(top, log_joint(params, labels, likelihoods));
    } while (next_path(labels, n));
    do {
      const double p = std::exp(log_joint(params, labels, likelihoods) - top);
      for (std::size_t t = 0; t < length; ++t) marginals(t, labels[t]) += p;
    } while (next_path(labels, n));
  }
  normalize_rows(marginals);
  return PosteriorLattice(std::move(marginals));
}

PosteriorLattice posterior_bruteforce(const HmcParams& params, std::span<const WordId> obs) {
  return posterior_bruteforce(params, likelihoods_of(params, obs));
}

Table forward_bruteforce(const HmcParams& params, std::span<const WordId> obs) {
  const std::size_t n = params.num_labels();
  const Table lik = likelihoods_of(params, obs);
  check_path_count(n, obs.size());
  Table alpha(obs.size(), n, 0.0);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    std::vector<LabelId> prefix(t + 1, 0);
    do {
      double p = params.pi[prefix[0]] * lik(0, prefix[0]);
      for (std::size_t s = 1; s <= t; ++s) p *= params.trans(prefix[s - 1], prefix[s]) * lik(s, prefix[s]);
      alpha(t, prefix[t]) += p;
    } while (next_path(prefix, n));
  }
  return alpha;
}

Table backward_bruteforce(const HmcParams& params, std::span<const WordId> obs) {
  const std::size_t n = params.num_labels();
  const std::size_t length = obs.size();
  const Table lik = likelihoods_of(params, obs);
  check_path_count(n, length);
  Table beta(length, n, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (t + 1 == length) {
        beta(t, i) = 1.0;
        continue;
      }
      std::vector<LabelId> suffix(length - t - 1, 0);
      do {
        double p = 1.0;
        std::size_t prev = i;
        for (std::size_t s = 0; s < suffix.size(); ++s) {
          p *= params.trans(prev, suffix[s]) * lik(t + 1 + s, suffix[s]);
          prev = static_cast<std::size_t>(suffix[s]);
        }
        beta(t, i) += p;
      } while (next_path(suffix, n));
    }
  }
  return beta;
}

Table exact_l_values(const HmcParams& params, std::span<const WordId> obs) {
  const std::size_t n = params.num_labels();
  Table l_values(obs.size(), n);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    double evidence = 0.0;
    for (std::size_t j = 0; j < n; ++j) evidence += params.pi[j] * params.emit(j, obs[t]);
    for (std::size_t i = 0; i < n; ++i) l_values(t, i) = params.pi[i] * params.emit(i, obs[t]) / evidence;
  }
  return l_values;
}

Table memm_posterior_bruteforce(const MemmTables& tables) {
  const std::size_t n = tables.first.size();
  const std::size_t length = tables.steps.size() + 1;
  if (n == 0) throw InvalidInput("empty MEMM input");
  check_path_count(n, length);
  Table filtered(length, n, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    std::vector<LabelId> prefix(t + 1, 0);
    do {
      double p = tables.first[prefix[0]];
      for (std::size_t s = 1; s <= t; ++s) p *= tables.steps[s - 1](prefix[s - 1], prefix[s]);
      filtered(t, prefix[t]) += p;
    } while (next_path(prefix, n));
  }
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    for (double v : filtered.row(t)) sum += v;
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidInput("MEMM prefix distribution does not sum to 1 at position " + std::to_string(t));
  }
  return filtered;
}

}  // namespace hmctag::oracle
