#include "hmctag/model.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hmctag/error.h"

namespace hmctag {

namespace {

constexpr std::array<char, 6> kMagic = {'H', 'M', 'C', 'T', 'A', 'G'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double d : v) f64(d);
  }
  void table(const Table& t) {
    u64(t.rows());
    u64(t.cols());
    for (double d : t.data()) f64(d);
  }
  void strings(const std::vector<std::string>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (const auto& s : v) str(s);
  }
  void logistic(const LogisticModel& m) {
    u64(m.num_features());
    u8(m.conditions_on_previous() ? 1 : 0);
    table(m.weights());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, 0, what); }

  void bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("model file is truncated");
  }
  std::uint8_t u8() {
    char c;
    bytes(&c, 1);
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(u8()) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(u8()) << (8 * k);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    std::string s(u32(), '\0');
    if (!s.empty()) bytes(s.data(), s.size());
    return s;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = count(8);
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }
  Table table() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (cols != 0 && rows > kMaxElements / cols) fail("table too large");
    Table t(rows, cols);
    for (auto& d : t.data()) d = f64();
    return t;
  }
  std::vector<std::string> strings() {
    std::vector<std::string> v(u32());
    for (auto& s : v) s = str();
    return v;
  }
  LogisticModel logistic() {
    const std::uint64_t features = u64();
    const bool conditioned = u8() != 0;
    Table weights = table();
    if (weights.cols() == 0 || weights.rows() != features + (conditioned ? weights.cols() : 0) + 1)
      fail("logistic weight table has the wrong shape");
    LogisticModel m(features, weights.cols(), conditioned);
    m.weights() = std::move(weights);
    return m;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes after model");
  }

 private:
  static constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

  std::uint64_t count(std::size_t element_size) {
    const std::uint64_t n = u64();
    if (n > kMaxElements / element_size) fail("element count too large");
    return n;
  }

  std::istream& in_;
  std::string source_;
};

void clear_emissions(HmcParams& params) { params.emit = Table(); }

}  // namespace

DecoderKind parse_decoder(std::string_view name) {
  if (name == "hmc-fb") return DecoderKind::kHmcFb;
  if (name == "hmc-efb") return DecoderKind::kHmcEfb;
  if (name == "memm") return DecoderKind::kMemm;
  if (name == "hmc-naive-features") return DecoderKind::kHmcNaiveFeatures;
  throw InvalidInput("unknown decoder: " + std::string(name));
}

std::string_view decoder_name(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kHmcFb: return "hmc-fb";
    case DecoderKind::kHmcEfb: return "hmc-efb";
    case DecoderKind::kMemm: return "memm";
    case DecoderKind::kHmcNaiveFeatures: return "hmc-naive-features";
  }
  return "?";
}

std::vector<TrainingExample> l_examples(const TaggedCorpus& corpus, const FeaturePipeline& pipeline,
                                        bool initial_only) {
  std::vector<TrainingExample> out;
  for (const auto& sentence : corpus.sentences) {
    auto features = pipeline.apply(sentence.tokens);
    const std::size_t length = initial_only ? std::min<std::size_t>(1, features.size()) : features.size();
    for (std::size_t t = 0; t < length; ++t)
      out.push_back({std::move(features[t]), std::nullopt, sentence.labels[t]});
  }
  return out;
}

std::vector<TrainingExample> l1_examples(const TaggedCorpus& corpus,
                                         const FeaturePipeline& pipeline) {
  std::vector<TrainingExample> out;
  for (const auto& sentence : corpus.sentences) {
    auto features = pipeline.apply(sentence.tokens);
    for (std::size_t t = 1; t < features.size(); ++t)
      out.push_back({std::move(features[t]), sentence.labels[t - 1], sentence.labels[t]});
  }
  return out;
}

Model train_model(const TaggedCorpus& corpus, const TrainOptions& options, TrainSummary* summary) {
  if (corpus.sentences.empty()) throw InvalidInput("training corpus is empty");
  validate(options.sgd);

  Model model;
  model.kind = options.kind;
  model.tmpl = options.kind == DecoderKind::kHmcFb ? FeatureTemplate::kNF : options.tmpl;
  model.tags = corpus.tags;
  model.vocab = corpus.vocab;
  model.delta = options.delta;
  model.sgd = options.sgd;

  TrainSummary local;
  local.sentences = corpus.sentences.size();
  local.tokens = corpus.token_count();
  local.labels = corpus.tags.size();
  local.vocabulary = corpus.vocab.size();

  const std::size_t n = corpus.tags.size();
  if (options.kind != DecoderKind::kHmcFb) {
    model.pipeline = FeaturePipeline::build(corpus, model.tmpl);
    local.features = model.pipeline.index.size();
  }

  switch (options.kind) {
    case DecoderKind::kHmcFb:
      model.hmc = estimate_params(corpus, options.delta);
      break;
    case DecoderKind::kHmcNaiveFeatures:
      model.hmc = estimate_params(corpus, options.delta);
      clear_emissions(model.hmc);
      model.naive = NaiveFeatureEmission::estimate(corpus, model.pipeline, options.delta);
      break;
    case DecoderKind::kHmcEfb: {
      model.hmc = estimate_params(corpus, options.delta);
      clear_emissions(model.hmc);
      const auto data = l_examples(corpus, model.pipeline);
      model.l = train(data, model.pipeline.index.size(), n, false, options.sgd);
      local.l_loss = mean_log_loss(model.l, data);
      break;
    }
    case DecoderKind::kMemm: {
      const auto first = l_examples(corpus, model.pipeline,
                                    options.memm_first == MemmFirstModel::kInitial);
      model.l = train(first, model.pipeline.index.size(), n, false, options.sgd);
      local.l_loss = mean_log_loss(model.l, first);
      const auto next = l1_examples(corpus, model.pipeline);
      if (next.empty()) {
        model.l1 = LogisticModel(model.pipeline.index.size(), n, true);
      } else {
        model.l1 = train(next, model.pipeline.index.size(), n, true, options.sgd);
        local.l1_loss = mean_log_loss(model.l1, next);
      }
      break;
    }
  }
  if (summary) *summary = local;
  return model;
}

std::vector<LabelId> Model::decode(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  switch (kind) {
    case DecoderKind::kHmcFb:
      return mpm_from_lattice(posterior_fb(hmc, word_ids(vocab, tokens)));
    case DecoderKind::kHmcNaiveFeatures:
      return mpm_from_lattice(posterior_fb(hmc, naive.likelihoods(pipeline.apply(tokens))));
    case DecoderKind::kHmcEfb:
      return decode_efb(efb_params(), l, pipeline, tokens);
    case DecoderKind::kMemm:
      return decode_memm(memm(), pipeline, tokens);
  }
  throw InvalidInput("bad decoder kind");
}

std::vector<std::string> Model::decode_labels(std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  for (LabelId id : decode(tokens)) out.push_back(tags.label(id));
  return out;
}

void write_model(std::ostream& out, const Model& model) {
  Writer w(out);
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(Model::kFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.kind));
  w.u8(static_cast<std::uint8_t>(model.tmpl));

  w.f64(model.delta);
  w.f64(model.sgd.learning_rate);
  w.f64(model.sgd.decay);
  w.u32(static_cast<std::uint32_t>(model.sgd.epochs));
  w.f64(model.sgd.l2);
  w.u64(model.sgd.batch_size);
  w.u64(model.sgd.seed);

  w.strings(model.tags.labels());
  w.strings(model.vocab.words());

  const auto& index = model.pipeline.index;
  w.u32(static_cast<std::uint32_t>(index.size()));
  for (std::size_t id = 0; id < index.size(); ++id) {
    w.u8(static_cast<std::uint8_t>(index.entries()[id].first));
    w.u8(index.is_unknown()[id] ? 1 : 0);
    w.str(index.entries()[id].second);
  }

  switch (model.kind) {
    case DecoderKind::kHmcFb:
      w.doubles(model.hmc.pi);
      w.table(model.hmc.trans);
      w.table(model.hmc.emit);
      break;
    case DecoderKind::kHmcNaiveFeatures:
      w.doubles(model.hmc.pi);
      w.table(model.hmc.trans);
      w.table(model.naive.probs());
      break;
    case DecoderKind::kHmcEfb:
      w.doubles(model.hmc.pi);
      w.table(model.hmc.trans);
      w.logistic(model.l);
      break;
    case DecoderKind::kMemm:
      w.logistic(model.l);
      w.logistic(model.l1);
      break;
  }
  if (!out) throw ParseError("<output>", 0, "failed writing model");
}

Model read_model(std::istream& in, const std::string& source_name) {
  Reader r(in, source_name);
  std::array<char, kMagic.size()> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) r.fail("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != Model::kFormatVersion)
    r.fail("unsupported model format version " + std::to_string(version));

  Model model;
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(DecoderKind::kHmcNaiveFeatures)) r.fail("unknown decoder kind");
  model.kind = static_cast<DecoderKind>(kind);
  const std::uint8_t tmpl = r.u8();
  if (tmpl > static_cast<std::uint8_t>(FeatureTemplate::kLF2)) r.fail("unknown feature template");
  model.tmpl = static_cast<FeatureTemplate>(tmpl);

  model.delta = r.f64();
  model.sgd.learning_rate = r.f64();
  model.sgd.decay = r.f64();
  model.sgd.epochs = static_cast<int>(r.u32());
  model.sgd.l2 = r.f64();
  model.sgd.batch_size = r.u64();
  model.sgd.seed = r.u64();

  try {
    model.tags = TagSet(r.strings());
    model.vocab = Vocabulary(r.strings());

    const std::uint32_t entries = r.u32();
    std::vector<std::pair<Family, std::string>> index_entries;
    std::vector<bool> is_unknown;
    for (std::uint32_t id = 0; id < entries; ++id) {
      const std::uint8_t family = r.u8();
      if (family >= kNumFamilies) r.fail("unknown feature family");
      is_unknown.push_back(r.u8() != 0);
      index_entries.emplace_back(static_cast<Family>(family), r.str());
    }
    model.pipeline = {model.tmpl, FeatureIndex::from_entries(std::move(index_entries), std::move(is_unknown))};

    const std::size_t n = model.tags.size();
    auto read_chain = [&] {
      model.hmc.pi = r.doubles();
      model.hmc.trans = r.table();
      if (model.hmc.pi.size() != n || model.hmc.trans.rows() != n || model.hmc.trans.cols() != n)
        r.fail("chain parameters do not match the tag set");
    };
    switch (model.kind) {
      case DecoderKind::kHmcFb:
        read_chain();
        model.hmc.emit = r.table();
        if (model.hmc.emit.rows() != n || model.hmc.emit.cols() != model.vocab.size() + 1)
          r.fail("emission table does not match the vocabulary");
        break;
      case DecoderKind::kHmcNaiveFeatures:
        read_chain();
        {
          Table probs = r.table();
          if (probs.rows() != n) r.fail("naive emission table does not match the tag set");
          model.naive = NaiveFeatureEmission(model.pipeline.index, std::move(probs));
        }
        break;
      case DecoderKind::kHmcEfb:
        read_chain();
        model.l = r.logistic();
        if (model.l.num_labels() != n || model.l.conditions_on_previous())
          r.fail("L model does not match the tag set");
        break;
      case DecoderKind::kMemm:
        model.l = r.logistic();
        model.l1 = r.logistic();
        if (model.l.num_labels() != n || model.l1.num_labels() != n || !model.l1.conditions_on_previous())
          r.fail("MEMM models do not match the tag set");
        break;
    }
  } catch (const InvalidInput& e) {
    r.fail(e.what());
  }
  r.expect_end();
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  write_model(out, model);
  out.close();
  if (!out) throw ParseError(path.string(), 0, "failed writing model");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open model file");
  return read_model(in, path.string());
}

}  // namespace hmctag
