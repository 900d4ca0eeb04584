#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "hmctag/error.h"
#include "hmctag/features.h"
#include "hmctag/hmc.h"
#include "hmctag/oracle.h"
#include "test_util.h"

namespace hmctag {
namespace {

using testing::make_corpus;

TEST_CASE("estimate_params on a two-token sentence approaches raw frequencies") {
  const auto corpus = make_corpus({{{"w0", "L0"}, {"w1", "L1"}}});
  const auto p = estimate_params(corpus, 1e-12);
  CHECK(p.pi[0] == doctest::Approx(0.5));
  CHECK(p.pi[1] == doctest::Approx(0.5));
  CHECK(p.trans(0, 1) == doctest::Approx(1.0));
  CHECK(p.emit(0, 0) == doctest::Approx(1.0));
  CHECK(p.emit.cols() == 3);  // two words + unknown
  validate(p);
}

TEST_CASE("estimate_params with a single label") {
  const auto corpus = make_corpus({{{"w0", "L0"}, {"w0", "L0"}, {"w0", "L0"}}});
  const auto p = estimate_params(corpus, 1e-12);
  CHECK(p.pi[0] == doctest::Approx(1.0));
  CHECK(p.trans(0, 0) == doctest::Approx(1.0));
  CHECK(p.emit(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("estimate_params matches direct counting with smoothing") {
  const auto corpus = make_corpus({
      {{"the", "D"}, {"dog", "N"}, {"runs", "V"}},
      {{"a", "D"}, {"cat", "N"}},
      {{"dogs", "N"}, {"run", "V"}, {"the", "D"}, {"dog", "N"}},
  });
  const double delta = 0.5;
  const auto p = estimate_params(corpus, delta);

  // Independent counts over (label string, word string) pairs.
  std::map<std::string, double> label_count;
  std::map<std::pair<std::string, std::string>, double> pair_count, emit_count;
  std::map<std::string, double> out_count, emit_total;
  for (const auto& s : corpus.sentences)
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      const auto& x = corpus.tags.label(s.labels[t]);
      label_count[x] += 1;
      emit_count[{x, s.tokens[t]}] += 1;
      emit_total[x] += 1;
      if (t > 0) {
        const auto& prev = corpus.tags.label(s.labels[t - 1]);
        pair_count[{prev, x}] += 1;
        out_count[prev] += 1;
      }
    }
  const double n = 3, m = static_cast<double>(corpus.vocab.size()) + 1, total = 9;
  for (const auto& x : corpus.tags.labels()) {
    const auto i = corpus.tags.id(x);
    CHECK(p.pi[i] == doctest::Approx((label_count[x] + delta) / (total + delta * n)).epsilon(1e-14));
    for (const auto& y : corpus.tags.labels())
      CHECK(p.trans(i, corpus.tags.id(y)) ==
            doctest::Approx((pair_count[{x, y}] + delta) / (out_count[x] + delta * n)).epsilon(1e-14));
    for (const auto& w : corpus.vocab.words())
      CHECK(p.emit(i, corpus.vocab.id(w)) ==
            doctest::Approx((emit_count[{x, w}] + delta) / (emit_total[x] + delta * m)).epsilon(1e-14));
    CHECK(p.emit(i, corpus.vocab.unknown_id()) ==
          doctest::Approx(delta / (emit_total[x] + delta * m)).epsilon(1e-14));
  }
  // "V -> D" only occurs within sentence 3; "V" ending sentence 1 must not
  // connect to "D" starting sentence 2.
  CHECK(pair_count[{"V", "D"}] == 1);
}

TEST_CASE("estimate_params rejects bad input") {
  CHECK_THROWS_AS(estimate_params(TaggedCorpus{}, 1e-6), InvalidInput);
  const auto corpus = make_corpus({{{"w", "L"}}});
  CHECK_THROWS_AS(estimate_params(corpus, 0.0), InvalidInput);
  CHECK_THROWS_AS(estimate_params(corpus, -1.0), InvalidInput);
}

TEST_CASE("estimated parameters always satisfy the stochasticity invariants") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto corpus = make_corpus(testing::synthetic_language(seed, 5 + seed));
    for (double delta : {1e-9, 1e-6, 0.1, 3.0}) {
      const auto p = estimate_params(corpus, delta);
      CHECK_NOTHROW(validate(p, 1e-12));
      for (double v : p.pi) CHECK(v > 0.0);
    }
  }
}

TEST_CASE("forward on the worked example") {
  const auto p = testing::worked_example();
  const std::vector<WordId> obs = {0, 0};
  const auto fwd = forward(p, obs);
  CHECK(fwd.unscaled(0, 0) == doctest::Approx(0.514286).epsilon(1e-6));
  CHECK(fwd.unscaled(0, 1) == doctest::Approx(0.085714).epsilon(1e-5));
  CHECK(fwd.unscaled(1, 0) == doctest::Approx(0.354857142857).epsilon(1e-10));
  CHECK(fwd.unscaled(1, 1) == doctest::Approx(0.041142857143).epsilon(1e-10));
  CHECK(std::exp(fwd.log_scale_sum()) == doctest::Approx(0.396).epsilon(1e-12));
}

TEST_CASE("forward with a single state is all ones after normalization") {
  HmcParams p;
  p.pi = {1.0};
  p.trans = Table(1, 1, 1.0);
  p.emit = Table(1, 3);
  p.emit(0, 0) = 0.2;
  p.emit(0, 1) = 0.3;
  p.emit(0, 2) = 0.5;
  const std::vector<WordId> obs = {0, 2, 1, 1};
  const auto fwd = forward(p, obs);
  for (std::size_t t = 0; t < obs.size(); ++t) CHECK(fwd.normalized(t, 0) == 1.0);

  const auto bwd = backward(p, obs);
  // beta_t = prod_{s>t} b(y_s)
  CHECK(bwd.unscaled(0, 0) == doctest::Approx(0.5 * 0.3 * 0.3).epsilon(1e-12));
  CHECK(bwd.unscaled(2, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(bwd.unscaled(3, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("backward on the worked example") {
  const auto p = testing::worked_example();
  const std::vector<WordId> one = {0};
  const auto base = backward(p, one);
  CHECK(base.unscaled(0, 0) == doctest::Approx(1.0));
  CHECK(base.unscaled(0, 1) == doctest::Approx(1.0));

  const std::vector<WordId> obs = {0, 0};
  const auto bwd = backward(p, obs);
  CHECK(bwd.unscaled(0, 0) == doctest::Approx(0.69).epsilon(1e-12));
  CHECK(bwd.unscaled(0, 1) == doctest::Approx(0.48).epsilon(1e-12));
}

TEST_CASE("forward and backward reject empty observations") {
  const auto p = testing::worked_example();
  CHECK_THROWS_AS(forward(p, std::vector<WordId>{}), InvalidInput);
  CHECK_THROWS_AS(backward(p, std::vector<WordId>{}), InvalidInput);
}

TEST_CASE("posterior_fb on the worked example") {
  const auto p = testing::worked_example();
  const std::vector<WordId> obs = {0, 0};
  const auto post = posterior_fb(p, obs);
  CHECK(post(0, 0) == doctest::Approx(0.896104).epsilon(1e-6));
  CHECK(post(0, 1) == doctest::Approx(0.103896).epsilon(1e-5));
  const auto oracle = oracle::posterior_bruteforce(p, obs);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(post(t, i) - oracle(t, i)) < 1e-12);
}

TEST_CASE("posterior_fb with uniform parameters is uniform") {
  HmcParams p;
  p.pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  p.trans = Table(3, 3, 1.0 / 3);
  p.emit = Table(3, 4, 0.25);
  const std::vector<WordId> obs = {0, 3, 1, 2, 2};
  const auto post = posterior_fb(p, obs);
  for (std::size_t t = 0; t < obs.size(); ++t)
    for (std::size_t i = 0; i < 3; ++i) CHECK(post(t, i) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("posterior_fb with one observation is proportional to pi * b") {
  std::mt19937_64 rng(3);
  const auto p = testing::random_hmc(rng, 4, 5);
  const std::vector<WordId> obs = {2};
  const auto post = posterior_fb(p, obs);
  double z = 0.0;
  for (std::size_t i = 0; i < 4; ++i) z += p.pi[i] * p.emit(i, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(post(0, i) == doctest::Approx(p.pi[i] * p.emit(i, 2) / z).epsilon(1e-14));
}

TEST_CASE("posterior_fb reports the position of a vanishing normalizer") {
  auto p = testing::worked_example();
  p.emit(0, 1) = 0.0;
  p.emit(1, 1) = 0.0;
  p.emit(0, 0) = 1.0;
  p.emit(1, 0) = 1.0;
  const std::vector<WordId> obs = {0, 0, 1};
  try {
    posterior_fb(p, obs);
    FAIL("expected NumericalDegeneracy");
  } catch (const NumericalDegeneracy& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("long sequences do not underflow") {
  std::mt19937_64 rng(11);
  const auto p = testing::random_hmc(rng, 5, 50);
  const auto obs = testing::random_obs(rng, 20000, 50);
  const auto post = posterior_fb(p, obs);
  for (std::size_t t = 0; t < obs.size(); t += 997) {
    double sum = 0.0;
    for (double v : post.row(t)) {
      CHECK(std::isfinite(v));
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(forward(p, obs).log_scale_sum() < -10000.0);
}

TEST_CASE("posterior_fb agrees with path enumeration on random chains") {
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_evidence = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = testing::uniform_size(rng, 1, 3);
    const std::size_t m = testing::uniform_size(rng, 1, 4);
    const std::size_t length = testing::uniform_size(rng, 1, 6);
    const auto p = testing::random_hmc(rng, n, m);
    const auto obs = testing::random_obs(rng, length, m);
    const auto post = posterior_fb(p, obs);
    const auto ref = oracle::posterior_bruteforce(p, obs);
    for (std::size_t t = 0; t < length; ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(post(t, i) - ref(t, i)));
        sum += post(t, i);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    const double evidence = oracle::observation_probability(p, obs);
    const double fwd_evidence = std::exp(forward(p, obs).log_scale_sum());
    worst_evidence = std::max(worst_evidence, std::abs(fwd_evidence - evidence) / evidence);
    // Unscaled alpha_T summed equals p(y).
    const auto fwd = forward(p, obs);
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) alpha_sum += fwd.unscaled(length - 1, i);
    CHECK(std::abs(alpha_sum - evidence) / evidence <= 1e-9);
  }
  CHECK(worst <= 1e-9);
  CHECK(worst_evidence <= 1e-9);
}

// ---- feature-independence emission ----

TEST_CASE("naive emission with one family equals the word emission table") {
  const auto corpus = make_corpus(testing::synthetic_language(5, 40));
  const auto pipeline = FeaturePipeline::build(corpus, FeatureTemplate::kNF);
  const double delta = 0.01;
  const auto naive = NaiveFeatureEmission::estimate(corpus, pipeline, delta);
  const auto p = estimate_params(corpus, delta);
  for (const auto& word : {std::string("the"), std::string("unseen-word")}) {
    const auto fv = pipeline.apply(std::vector<std::string>{word});
    for (std::size_t i = 0; i < corpus.tags.size(); ++i)
      CHECK(naive.emission(fv[0], static_cast<LabelId>(i)) ==
            doctest::Approx(p.emit(i, corpus.vocab.id(word))).epsilon(1e-13));
  }
}

TEST_CASE("naive emission multiplies per-family probabilities") {
  const auto index = FeatureIndex::from_entries(
      {{Family::kWord, "a"}, {Family::kWord, ""}, {Family::kSuffix2, "x"}, {Family::kSuffix2, "y"},
       {Family::kSuffix2, ""}},
      {false, true, false, false, true});
  Table probs(1, 5);
  probs(0, 0) = 0.5;
  probs(0, 1) = 0.5;
  probs(0, 2) = 0.3;
  probs(0, 3) = 0.6;
  probs(0, 4) = 0.1;
  const NaiveFeatureEmission naive(index, probs);
  FeatureVector fv{{{Family::kWord, 0}, {Family::kSuffix2, 2}}};
  CHECK(naive.emission(fv, 0) == doctest::Approx(0.15).epsilon(1e-15));

  FeatureVector foreign{{{Family::kPrefix3, 0}}};
  CHECK_THROWS_AS(naive.emission(foreign, 0), InvalidInput);
}

TEST_CASE("naive emission underestimates perfectly correlated features") {
  // Every word has at most three characters, so suffix-3 always equals the
  // word: the two families carry the same information.
  const auto corpus = make_corpus({
      {{"the", "D"}, {"dog", "N"}, {"ran", "V"}},
      {{"a", "D"}, {"cat", "N"}, {"sat", "V"}},
      {{"the", "D"}, {"cat", "N"}, {"ran", "V"}},
  });
  const auto pipeline = FeaturePipeline::build(corpus, FeatureTemplate::kLF1);
  const double delta = 1e-6;
  const auto naive = NaiveFeatureEmission::estimate(corpus, pipeline, delta);

  const std::string word = "cat";
  const LabelId noun = corpus.tags.id("N");
  FeatureVector pair{{{Family::kWord, pipeline.index.lookup(Family::kWord, word)},
                      {Family::kSuffix3, pipeline.index.lookup(Family::kSuffix3, word)}}};
  const double product = naive.emission(pair, noun);

  // Exact joint frequency of (word = cat, suffix-3 = cat) among N tokens.
  double joint = 0.0, label_total = 0.0;
  for (const auto& s : corpus.sentences)
    for (std::size_t t = 0; t < s.tokens.size(); ++t)
      if (s.labels[t] == noun) {
        label_total += 1;
        if (s.tokens[t] == word && s.tokens[t].substr(s.tokens[t].size() - 3) == word) joint += 1;
      }
  joint /= label_total;
  CHECK(joint == doctest::Approx(2.0 / 3.0));
  CHECK(product < joint);
  CHECK(product == doctest::Approx(joint * joint).epsilon(1e-4));
}

}  // namespace
}  // namespace hmctag
