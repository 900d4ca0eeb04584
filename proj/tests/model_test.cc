#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hmctag/commands.h"
#include "hmctag/error.h"
#include "test_util.h"

namespace hmctag {
namespace {

namespace fs = std::filesystem;
using Sentences = std::vector<std::vector<std::pair<std::string, std::string>>>;

std::string conllu_text(const Sentences& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) {
    for (std::size_t t = 0; t < s.size(); ++t)
      out << t + 1 << '\t' << s[t].first << "\t_\t" << s[t].second << "\t_\t_\t_\t_\t_\t_\n";
    out << '\n';
  }
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("hmctag_model_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string serialize(const Model& m) {
  std::ostringstream out;
  write_model(out, m);
  return out.str();
}

TrainOptions quick(DecoderKind kind, FeatureTemplate tmpl = FeatureTemplate::kLF1) {
  TrainOptions o;
  o.kind = kind;
  o.tmpl = tmpl;
  o.sgd.epochs = 4;
  return o;
}

std::vector<std::string> tokens_of(const std::vector<std::pair<std::string, std::string>>& s) {
  std::vector<std::string> out;
  for (const auto& [w, tag] : s) out.push_back(w);
  return out;
}

TagCommand tag_of(const fs::path& model, std::optional<DecoderKind> kind = std::nullopt) {
  TagCommand cmd;
  cmd.model = model;
  cmd.expected_kind = kind;
  return cmd;
}

const std::vector<DecoderKind> kAllKinds{DecoderKind::kHmcFb, DecoderKind::kHmcEfb, DecoderKind::kMemm,
                                         DecoderKind::kHmcNaiveFeatures};

TEST_CASE("decoder names round trip") {
  for (auto k : kAllKinds) CHECK(parse_decoder(decoder_name(k)) == k);
  CHECK_THROWS_AS(parse_decoder("crf"), InvalidInput);
}

TEST_CASE("every model kind survives a save/load round trip byte for byte") {
  const auto corpus = testing::make_corpus(testing::synthetic_language(5, 60));
  const auto probe = testing::synthetic_language(6, 10);
  for (auto kind : kAllKinds) {
    CAPTURE(decoder_name(kind));
    const Model m = train_model(corpus, quick(kind));
    const std::string bytes = serialize(m);
    std::istringstream in(bytes);
    const Model back = read_model(in);
    CHECK(back == m);
    CHECK(serialize(back) == bytes);
    for (const auto& s : probe) CHECK(back.decode(tokens_of(s)) == m.decode(tokens_of(s)));
  }
}

TEST_CASE("hmc-fb ignores the requested template") {
  const auto corpus = testing::make_corpus(testing::synthetic_language(5, 20));
  const Model m = train_model(corpus, quick(DecoderKind::kHmcFb, FeatureTemplate::kLF2));
  CHECK(m.tmpl == FeatureTemplate::kNF);
}

TEST_CASE("corrupt model files are parse errors") {
  const auto corpus = testing::make_corpus(testing::synthetic_language(5, 20));
  const std::string bytes = serialize(train_model(corpus, quick(DecoderKind::kHmcEfb)));

  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(read_model(truncated), ParseError);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream magic(bad_magic);
  CHECK_THROWS_AS(read_model(magic), ParseError);

  std::string bad_version = bytes;
  bad_version[6] = 9;
  std::istringstream version(bad_version);
  CHECK_THROWS_AS(read_model(version), ParseError);

  std::istringstream trailing(bytes + "x");
  CHECK_THROWS_AS(read_model(trailing), ParseError);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_model(empty), ParseError);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto corpus = testing::make_corpus(testing::synthetic_language(9, 80));
  for (auto kind : {DecoderKind::kHmcEfb, DecoderKind::kMemm}) {
    CHECK(serialize(train_model(corpus, quick(kind))) == serialize(train_model(corpus, quick(kind))));
    auto other = quick(kind);
    other.sgd.seed = 7;
    CHECK(serialize(train_model(corpus, other)) != serialize(train_model(corpus, quick(kind))));
  }
}

TEST_CASE("report arithmetic") {
  EvalReport r;
  for (int i = 0; i < 7; ++i) r.add("N", "N", false);
  r.add("N", "V", false);
  r.add("V", "V", true);
  r.add("V", "N", true);
  CHECK(r.known_error_rate() == doctest::Approx(12.5));
  CHECK(r.unknown_error_rate() == doctest::Approx(50.0));
  CHECK(r.global_error_rate() == doctest::Approx(20.0));
  CHECK(format_rates(r) == "12.50%/50.00%/20.00%");
  CHECK((r.confusion[{"N", "V"}]) == 1);
  CHECK(EvalReport{}.global_error_rate() == 0.0);

  std::ostringstream kv;
  write_report_kv(kv, r, {"toy", "memm", "lf1"});
  CHECK(kv.str().find("kw_err=12.50") != std::string::npos);
  CHECK(kv.str().find("tokens=10") != std::string::npos);
}

TEST_CASE("a model that memorized its training data makes no errors on it") {
  const Sentences data{{{"the", "D"}, {"dog", "N"}, {"runs", "V"}}, {{"a", "D"}, {"cat", "N"}, {"sits", "V"}}};
  const auto corpus = testing::make_corpus(data);
  for (auto kind : kAllKinds) {
    CAPTURE(decoder_name(kind));
    auto options = quick(kind, FeatureTemplate::kNF);
    options.sgd.epochs = 200;
    options.sgd.learning_rate = 1.0;
    options.sgd.batch_size = 1;
    const Model m = train_model(corpus, options);
    const auto report = evaluate_model(m, corpus, corpus.vocab);
    CHECK(report.total_tokens() == 6);
    CHECK(report.unknown_tokens == 0);
    CHECK(report.total_errors() == 0);
  }
}

TEST_CASE("bucket counts add up and match across decoders") {
  const auto train = testing::make_corpus(testing::synthetic_language(11, 150));
  const auto test = testing::make_corpus(testing::synthetic_language(12, 40));
  const auto rows = compare_decoders(train, test, {FeatureTemplate::kNF, FeatureTemplate::kLF1},
                                     quick(DecoderKind::kHmcEfb));
  REQUIRE(rows.size() == 2);
  const auto flags = split_known_unknown(test.sentences, train.vocab);
  std::size_t unknown = 0;
  for (const auto& f : flags) unknown += static_cast<std::size_t>(std::count(f.begin(), f.end(), true));
  for (const auto& row : rows) {
    for (const EvalReport* r : {&row.memm, &row.efb}) {
      CHECK(r->total_tokens() == test.token_count());
      CHECK(r->unknown_tokens == unknown);
      CHECK(r->known_errors <= r->known_tokens);
      CHECK(r->unknown_errors <= r->unknown_tokens);
      std::size_t confusion = 0;
      for (const auto& [pair, n] : r->confusion) confusion += n;
      CHECK(confusion == r->total_tokens());
    }
    CHECK(row.memm.known_tokens == row.efb.known_tokens);
  }
}

TEST_CASE("shared MEMM first model is the EFB L") {
  const auto corpus = testing::make_corpus(testing::synthetic_language(13, 60));
  const Model efb = train_model(corpus, quick(DecoderKind::kHmcEfb));
  const Model memm = train_model(corpus, quick(DecoderKind::kMemm));
  CHECK(memm.l == efb.l);
  auto initial = quick(DecoderKind::kMemm);
  initial.memm_first = MemmFirstModel::kInitial;
  CHECK(!(train_model(corpus, initial).l == efb.l));
}

TEST_CASE("feature templates help on unknown words") {
  const auto train = testing::make_corpus(testing::synthetic_language(21, 400));
  const auto test = testing::make_corpus(testing::synthetic_language(22, 150));
  auto options = quick(DecoderKind::kHmcEfb);
  options.sgd.epochs = 10;
  const auto rows = compare_decoders(train, test, {FeatureTemplate::kNF, FeatureTemplate::kLF1}, options);
  MESSAGE("NF  efb " << format_rates(rows[0].efb) << " memm " << format_rates(rows[0].memm));
  MESSAGE("LF1 efb " << format_rates(rows[1].efb) << " memm " << format_rates(rows[1].memm));
  REQUIRE(rows[0].efb.unknown_tokens > 20);
  CHECK(rows[1].efb.unknown_error_rate() < rows[0].efb.unknown_error_rate());
}

TEST_CASE("tag command") {
  TempDir dir;
  const auto train = dir.write("train.conllu", conllu_text(testing::synthetic_language(3, 50)));
  TrainCommand tc{{train, CorpusFormat::kConllu, std::nullopt}, quick(DecoderKind::kHmcEfb), dir.path / "m.bin"};
  std::ostringstream out, err;
  REQUIRE(run_train(tc, out, err) == kExitOk);
  CHECK(out.str().find("decoder=hmc-efb") != std::string::npos);

  SUBCASE("empty input gives empty output") {
    std::istringstream in("");
    std::ostringstream o;
    CHECK(run_tag(tag_of(dir.path / "m.bin"), in, o, err) == kExitOk);
    CHECK(o.str().empty());
  }
  SUBCASE("single token") {
    std::istringstream in("the\n");
    std::ostringstream o;
    CHECK(run_tag(tag_of(dir.path / "m.bin"), in, o, err) == kExitOk);
    CHECK(o.str() == "the\tDET\n");
  }
  SUBCASE("sentences are separated by a blank line") {
    std::istringstream in("the zokation\nthe\n");
    std::ostringstream o;
    CHECK(run_tag(tag_of(dir.path / "m.bin"), in, o, err) == kExitOk);
    const std::string text = o.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }
  SUBCASE("kind mismatch is a usage error") {
    std::istringstream in("the\n");
    std::ostringstream o, e;
    CHECK(run_tag(tag_of(dir.path / "m.bin", DecoderKind::kMemm), in, o, e) == kExitUsage);
    CHECK(e.str().find("hmc-efb") != std::string::npos);
  }
  SUBCASE("missing model is a data error") {
    std::istringstream in("the\n");
    std::ostringstream o, e;
    CHECK(run_tag(tag_of(dir.path / "absent.bin"), in, o, e) == kExitData);
  }
}

TEST_CASE("train and evaluate twice give identical bytes") {
  TempDir dir;
  const auto train = dir.write("train.conllu", conllu_text(testing::synthetic_language(3, 80)));
  const auto test = dir.write("test.conllu", conllu_text(testing::synthetic_language(4, 20)));
  std::ostringstream sink;
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto model = dir.path / ("m" + std::to_string(run) + ".bin");
    REQUIRE(run_train({{train, CorpusFormat::kConllu, std::nullopt}, quick(DecoderKind::kMemm), model}, sink,
                      sink) == kExitOk);
    EvaluateCommand ec;
    ec.model = model;
    ec.test = {test, CorpusFormat::kConllu, std::nullopt};
    ec.report = dir.path / ("r" + std::to_string(run) + ".txt");
    REQUIRE(run_evaluate(ec, sink, sink) == kExitOk);
    reports[run] = slurp(*ec.report);
  }
  CHECK(slurp(dir.path / "m0.bin") == slurp(dir.path / "m1.bin"));
  CHECK(reports[0] == reports[1]);
  CHECK(reports[0].find("global_err=") != std::string::npos);
}

TEST_CASE("data errors map to exit code 2") {
  TempDir dir;
  const auto bad = dir.write("bad.conllu", "1\tx\n");
  std::ostringstream out, err;
  CHECK(run_train({{bad, CorpusFormat::kConllu, std::nullopt}, quick(DecoderKind::kHmcEfb), dir.path / "m.bin"},
                  out, err) == kExitData);
  CHECK(err.str().find("bad.conllu:1") != std::string::npos);
  const auto empty = dir.write("empty.conllu", "");
  CHECK(run_train({{empty, CorpusFormat::kConllu, std::nullopt}, quick(DecoderKind::kHmcEfb), dir.path / "m.bin"},
                  out, err) == kExitData);
}

TEST_CASE("data directory lookup") {
  TempDir dir;
  dir.write("c.conllu", "1\ta\t_\tDET\t_\t_\t_\t_\t_\t_\n");
  ::setenv(kDataDirEnv, dir.path.c_str(), 1);
  CHECK(resolve_data_path("c.conllu") == dir.path / "c.conllu");
  CHECK(load_corpus({"c.conllu", CorpusFormat::kConllu, std::nullopt}).token_count() == 1);
  ::unsetenv(kDataDirEnv);
  CHECK(resolve_data_path("c.conllu") == fs::path("c.conllu"));
}

}  // namespace
}  // namespace hmctag
