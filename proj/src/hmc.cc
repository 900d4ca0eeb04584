#include "hmctag/hmc.h"

#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "hmctag/error.h"

namespace hmctag {

namespace {

void check_row_sum(std::span<const double> row, double tol, const std::string& what) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(what + " has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) throw InvalidInput(what + " does not sum to 1");
}

void check_likelihoods(const HmcParams& params, const Table& likelihoods) {
  if (likelihoods.rows() == 0) throw InvalidInput("empty observation sequence");
  if (likelihoods.cols() != params.num_labels())
    throw InvalidInput("likelihood matrix has " + std::to_string(likelihoods.cols()) +
                       " columns, expected " + std::to_string(params.num_labels()));
}

double normalize_row(std::span<double> row, std::size_t t, const char* pass) {
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericalDegeneracy(t, std::string(pass) + " normalizer is zero or non-finite");
  for (double& v : row) v /= sum;
  return sum;
}

}  // namespace

void validate(const HmcParams& params, double tol) {
  const std::size_t n = params.num_labels();
  if (n == 0) throw InvalidInput("HMC has no labels");
  if (params.trans.rows() != n || params.trans.cols() != n)
    throw InvalidInput("transition table is not N x N");
  if (params.emit.rows() != n || params.emit.cols() == 0)
    throw InvalidInput("emission table has the wrong shape");
  check_row_sum(params.pi, tol, "pi");
  for (std::size_t i = 0; i < n; ++i) {
    check_row_sum(params.trans.row(i), tol, "transition row " + std::to_string(i));
    check_row_sum(params.emit.row(i), tol, "emission row " + std::to_string(i));
  }
}

HmcParams estimate_params(const TaggedCorpus& corpus, double delta) {
  if (corpus.sentences.empty()) throw InvalidInput("cannot estimate from an empty corpus");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("smoothing delta must be positive");
  const std::size_t n = corpus.tags.size();
  const std::size_t m = corpus.vocab.size() + 1;
  if (n == 0) throw InvalidInput("corpus has no labels");

  std::vector<double> label_counts(n, 0.0);
  Table pair_counts(n, n, 0.0);
  Table emit_counts(n, m, 0.0);
  for (const auto& sentence : corpus.sentences) {
    if (sentence.tokens.size() != sentence.labels.size())
      throw InvalidInput("sentence has mismatched token and label counts");
    for (std::size_t t = 0; t < sentence.labels.size(); ++t) {
      const LabelId x = sentence.labels[t];
      if (x < 0 || static_cast<std::size_t>(x) >= n) throw InvalidInput("label id out of range");
      label_counts[x] += 1.0;
      emit_counts(x, static_cast<std::size_t>(corpus.vocab.id(sentence.tokens[t]))) += 1.0;
      if (t > 0) pair_counts(sentence.labels[t - 1], x) += 1.0;
    }
  }

  HmcParams params;
  params.pi.resize(n);
  const double pi_total = std::accumulate(label_counts.begin(), label_counts.end(), 0.0) + delta * n;
  for (std::size_t i = 0; i < n; ++i) params.pi[i] = (label_counts[i] + delta) / pi_total;

  params.trans = Table(n, n);
  params.emit = Table(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    auto pairs = pair_counts.row(i);
    const double row_total = std::accumulate(pairs.begin(), pairs.end(), 0.0) + delta * n;
    for (std::size_t j = 0; j < n; ++j) params.trans(i, j) = (pairs[j] + delta) / row_total;

    auto emits = emit_counts.row(i);
    const double emit_total = std::accumulate(emits.begin(), emits.end(), 0.0) + delta * m;
    for (std::size_t y = 0; y < m; ++y) params.emit(i, y) = (emits[y] + delta) / emit_total;
  }
  return params;
}

double ScaledRecursion::unscaled(std::size_t t, std::size_t i) const {
  return normalized(t, i) * std::exp(log_multiplier[t]);
}

double ScaledRecursion::log_scale_sum() const {
  double sum = 0.0;
  for (double s : scales) sum += std::log(s);
  return sum;
}

Table emission_matrix(const HmcParams& params, std::span<const WordId> obs) {
  const std::size_t n = params.num_labels();
  Table lik(obs.size(), n);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || static_cast<std::size_t>(obs[t]) >= params.emit.cols())
      throw InvalidInput("word id out of range at position " + std::to_string(t));
    for (std::size_t i = 0; i < n; ++i) lik(t, i) = params.emit(i, static_cast<std::size_t>(obs[t]));
  }
  return lik;
}

ScaledRecursion forward(const HmcParams& params, const Table& likelihoods) {
  check_likelihoods(params, likelihoods);
  const std::size_t n = params.num_labels();
  const std::size_t length = likelihoods.rows();
  ScaledRecursion out{Table(length, n), std::vector<double>(length), std::vector<double>(length)};

  for (std::size_t i = 0; i < n; ++i) out.normalized(0, i) = params.pi[i] * likelihoods(0, i);
  out.scales[0] = normalize_row(out.normalized.row(0), 0, "forward");
  out.log_multiplier[0] = std::log(out.scales[0]);

  for (std::size_t t = 1; t < length; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += out.normalized(t - 1, j) * params.trans(j, i);
      out.normalized(t, i) = likelihoods(t, i) * sum;
    }
    out.scales[t] = normalize_row(out.normalized.row(t), t, "forward");
    out.log_multiplier[t] = out.log_multiplier[t - 1] + std::log(out.scales[t]);
  }
  return out;
}

ScaledRecursion backward(const HmcParams& params, const Table& likelihoods) {
  check_likelihoods(params, likelihoods);
  const std::size_t n = params.num_labels();
  const std::size_t length = likelihoods.rows();
  ScaledRecursion out{Table(length, n), std::vector<double>(length), std::vector<double>(length)};

  const std::size_t last = length - 1;
  for (std::size_t i = 0; i < n; ++i) out.normalized(last, i) = 1.0;
  out.scales[last] = normalize_row(out.normalized.row(last), last, "backward");
  out.log_multiplier[last] = std::log(out.scales[last]);

  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        sum += out.normalized(t + 1, j) * params.trans(i, j) * likelihoods(t + 1, j);
      out.normalized(t, i) = sum;
    }
    out.scales[t] = normalize_row(out.normalized.row(t), t, "backward");
    out.log_multiplier[t] = out.log_multiplier[t + 1] + std::log(out.scales[t]);
  }
  return out;
}

ScaledRecursion forward(const HmcParams& params, std::span<const WordId> obs) {
  return forward(params, emission_matrix(params, obs));
}

ScaledRecursion backward(const HmcParams& params, std::span<const WordId> obs) {
  return backward(params, emission_matrix(params, obs));
}

PosteriorLattice combine_posterior(const ScaledRecursion& fwd, const ScaledRecursion& bwd) {
  const std::size_t length = fwd.normalized.rows();
  const std::size_t n = fwd.normalized.cols();
  Table post(length, n);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < n; ++i) post(t, i) = fwd.normalized(t, i) * bwd.normalized(t, i);
    normalize_row(post.row(t), t, "posterior");
  }
  return PosteriorLattice(std::move(post));
}

PosteriorLattice posterior_fb(const HmcParams& params, const Table& likelihoods) {
  // Forward first: a vanishing evidence is then reported where it occurs.
  auto fwd = forward(params, likelihoods);
  auto bwd = backward(params, likelihoods);
  return combine_posterior(fwd, bwd);
}

PosteriorLattice posterior_fb(const HmcParams& params, std::span<const WordId> obs) {
  return posterior_fb(params, emission_matrix(params, obs));
}

NaiveFeatureEmission NaiveFeatureEmission::estimate(const TaggedCorpus& corpus,
                                                    const FeaturePipeline& pipeline,
                                                    double delta) {
  if (corpus.sentences.empty()) throw InvalidInput("cannot estimate from an empty corpus");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("smoothing delta must be positive");
  const std::size_t n = corpus.tags.size();
  const std::size_t ids = pipeline.index.size();

  Table counts(n, ids, 0.0);
  for (const auto& sentence : corpus.sentences) {
    const auto features = pipeline.apply(sentence.tokens);
    for (std::size_t t = 0; t < features.size(); ++t)
      for (const auto& f : features[t].active) counts(sentence.labels[t], f.id) += 1.0;
  }

  // Per-family totals and sizes.
  std::array<double, kNumFamilies> family_size{};
  for (std::size_t id = 0; id < ids; ++id)
    family_size[static_cast<std::size_t>(pipeline.index.family_of(static_cast<std::uint32_t>(id)))] += 1.0;

  Table probs(n, ids);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kNumFamilies> totals{};
    for (std::size_t id = 0; id < ids; ++id)
      totals[static_cast<std::size_t>(pipeline.index.family_of(static_cast<std::uint32_t>(id)))] +=
          counts(i, id);
    for (std::size_t id = 0; id < ids; ++id) {
      const auto f = static_cast<std::size_t>(pipeline.index.family_of(static_cast<std::uint32_t>(id)));
      probs(i, id) = (counts(i, id) + delta) / (totals[f] + delta * family_size[f]);
    }
  }
  return NaiveFeatureEmission(pipeline.index, std::move(probs));
}

NaiveFeatureEmission::NaiveFeatureEmission(const FeatureIndex& index, Table probs)
    : probs_(std::move(probs)) {
  if (probs_.cols() != index.size())
    throw InvalidInput("naive emission table does not match the feature index");
  family_of_id_.reserve(index.size());
  for (std::size_t id = 0; id < index.size(); ++id)
    family_of_id_.push_back(index.family_of(static_cast<std::uint32_t>(id)));
  for (std::size_t i = 0; i < probs_.rows(); ++i) {
    std::array<double, kNumFamilies> sums{};
    std::array<bool, kNumFamilies> seen{};
    for (std::size_t id = 0; id < probs_.cols(); ++id) {
      const auto f = static_cast<std::size_t>(family_of_id_[id]);
      sums[f] += probs_(i, id);
      seen[f] = true;
    }
    for (std::size_t f = 0; f < kNumFamilies; ++f)
      if (seen[f] && std::abs(sums[f] - 1.0) > 1e-9)
        throw InvalidInput("naive emission family " + std::string(family_name(static_cast<Family>(f))) +
                           " does not sum to 1 for label " + std::to_string(i));
  }
}

double NaiveFeatureEmission::emission(const FeatureVector& features, LabelId label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= probs_.rows())
    throw InvalidInput("label id out of range");
  double p = 1.0;
  for (const auto& f : features.active) {
    if (f.id >= family_of_id_.size() || family_of_id_[f.id] != f.family)
      throw InvalidInput("feature family " + std::string(family_name(f.family)) +
                         " was not seen at training");
    p *= probs_(static_cast<std::size_t>(label), f.id);
  }
  return p;
}

Table NaiveFeatureEmission::likelihoods(std::span<const FeatureVector> sentence) const {
  Table lik(sentence.size(), num_labels());
  for (std::size_t t = 0; t < sentence.size(); ++t)
    for (std::size_t i = 0; i < num_labels(); ++i)
      lik(t, i) = emission(sentence[t], static_cast<LabelId>(i));
  return lik;
}

}  // namespace hmctag
