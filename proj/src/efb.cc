#include "hmctag/efb.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hmctag/error.h"

namespace hmctag {

namespace {

void check_params(const EfbParams& params, const Table& l_values) {
  const std::size_t n = params.num_labels();
  if (n == 0) throw InvalidInput("EFB parameters have no labels");
  if (params.trans.rows() != n || params.trans.cols() != n)
    throw InvalidInput("transition table is not N x N");
  for (std::size_t i = 0; i < n; ++i)
    if (!(params.pi[i] > 0.0))
      throw InvalidInput("pi of state " + std::to_string(i) + " must be positive for the L/pi ratio");
  if (l_values.rows() == 0) throw InvalidInput("empty observation sequence");
  if (l_values.cols() != n)
    throw InvalidInput("L table has " + std::to_string(l_values.cols()) + " columns, expected " +
                       std::to_string(n));
}

double floored(double p) { return std::max(p, kProbabilityFloor); }

double normalize_row(std::span<double> row, std::size_t t, const char* pass) {
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericalDegeneracy(t, std::string(pass) + " normalizer is zero or non-finite");
  for (double& v : row) v /= sum;
  return sum;
}

}  // namespace

Table collect_l_values(const LProvider& provider, std::size_t length, std::size_t num_labels) {
  Table l_values(length, num_labels);
  for (std::size_t t = 0; t < length; ++t) {
    const auto l = provider(t);
    if (l.size() != num_labels)
      throw InvalidInput("L provider returned " + std::to_string(l.size()) + " values at position " +
                         std::to_string(t));
    std::copy(l.begin(), l.end(), l_values.row(t).begin());
  }
  return l_values;
}

ScaledRecursion entropic_forward(const EfbParams& params, const Table& l_values) {
  check_params(params, l_values);
  const std::size_t n = params.num_labels();
  const std::size_t length = l_values.rows();
  ScaledRecursion out{Table(length, n), std::vector<double>(length), std::vector<double>(length)};

  for (std::size_t i = 0; i < n; ++i) out.normalized(0, i) = floored(l_values(0, i));
  out.scales[0] = normalize_row(out.normalized.row(0), 0, "entropic forward");
  out.log_multiplier[0] = std::log(out.scales[0]);

  for (std::size_t t = 1; t < length; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += out.normalized(t - 1, j) * params.trans(j, i);
      out.normalized(t, i) = floored(l_values(t, i)) / params.pi[i] * sum;
    }
    out.scales[t] = normalize_row(out.normalized.row(t), t, "entropic forward");
    out.log_multiplier[t] = out.log_multiplier[t - 1] + std::log(out.scales[t]);
  }
  return out;
}

ScaledRecursion entropic_backward(const EfbParams& params, const Table& l_values) {
  check_params(params, l_values);
  const std::size_t n = params.num_labels();
  const std::size_t length = l_values.rows();
  ScaledRecursion out{Table(length, n), std::vector<double>(length), std::vector<double>(length)};

  const std::size_t last = length - 1;
  for (std::size_t i = 0; i < n; ++i) out.normalized(last, i) = 1.0;
  out.scales[last] = normalize_row(out.normalized.row(last), last, "entropic backward");
  out.log_multiplier[last] = std::log(out.scales[last]);

  std::vector<double> ratio(n);
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t j = 0; j < n; ++j)
      ratio[j] = floored(l_values(t + 1, j)) / params.pi[j] * out.normalized(t + 1, j);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += ratio[j] * params.trans(i, j);
      out.normalized(t, i) = sum;
    }
    out.scales[t] = normalize_row(out.normalized.row(t), t, "entropic backward");
    out.log_multiplier[t] = out.log_multiplier[t + 1] + std::log(out.scales[t]);
  }
  return out;
}

PosteriorLattice posterior_efb(const EfbParams& params, const Table& l_values) {
  auto fwd = entropic_forward(params, l_values);
  auto bwd = entropic_backward(params, l_values);
  return combine_posterior(fwd, bwd);
}

PosteriorLattice posterior_efb(const EfbParams& params, const LProvider& provider,
                               std::size_t length) {
  return posterior_efb(params, collect_l_values(provider, length, params.num_labels()));
}

std::vector<LabelId> decode_efb(const EfbParams& params, const LogisticModel& model,
                                const FeaturePipeline& pipeline,
                                std::span<const std::string> tokens) {
  if (tokens.empty()) return {};
  if (model.num_labels() != params.num_labels())
    throw InvalidInput("L model and chain parameters disagree on the label count");
  const auto features = pipeline.apply(tokens);
  const LProvider provider = [&](std::size_t t) { return model.predict(features[t]); };
  return mpm_from_lattice(posterior_efb(params, provider, tokens.size()));
}

}  // namespace hmctag
