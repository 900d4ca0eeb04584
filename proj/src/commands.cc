#include "hmctag/commands.h"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hmctag/error.h"

namespace hmctag {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalDegeneracy& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

bool kind_matches(const Model& model, const std::optional<DecoderKind>& expected, std::ostream& err) {
  if (!expected || *expected == model.kind) return true;
  err << "model is of kind " << decoder_name(model.kind) << ", not " << decoder_name(*expected) << '\n';
  return false;
}

}  // namespace

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
  if (path.is_absolute() || std::filesystem::exists(path)) return path;
  if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
    auto candidate = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return path;
}

TaggedCorpus load_corpus(const CorpusSource& source) {
  std::optional<TagMap> tagmap;
  if (source.tagmap) tagmap = TagMap::load(resolve_data_path(*source.tagmap));
  return read_corpus(resolve_data_path(source.path), source.format, tagmap ? &*tagmap : nullptr);
}

EvalReport evaluate_model(const Model& model, const TaggedCorpus& test,
                          const Vocabulary& train_vocab) {
  EvalReport report;
  const auto unknown = split_known_unknown(test.sentences, train_vocab);
  for (std::size_t s = 0; s < test.sentences.size(); ++s) {
    const auto& sentence = test.sentences[s];
    const auto predicted = model.decode_labels(sentence.tokens);
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t)
      report.add(test.tags.label(sentence.labels[t]), predicted[t], unknown[s][t]);
  }
  return report;
}

std::vector<CompareRow> compare_decoders(const TaggedCorpus& train, const TaggedCorpus& test,
                                         const std::vector<FeatureTemplate>& templates,
                                         const TrainOptions& options) {
  std::vector<CompareRow> rows;
  for (FeatureTemplate tmpl : templates) {
    TrainOptions efb_options = options;
    efb_options.kind = DecoderKind::kHmcEfb;
    efb_options.tmpl = tmpl;
    const Model efb = train_model(train, efb_options);

    Model memm;
    if (options.memm_first == MemmFirstModel::kShared) {
      // Same pipeline and the very same L; only L1 is new.
      memm = efb;
      memm.kind = DecoderKind::kMemm;
      memm.hmc = HmcParams();
      const auto next = l1_examples(train, memm.pipeline);
      memm.l1 = next.empty() ? LogisticModel(memm.pipeline.index.size(), train.tags.size(), true)
                             : hmctag::train(next, memm.pipeline.index.size(), train.tags.size(), true,
                                             options.sgd);
    } else {
      TrainOptions memm_options = efb_options;
      memm_options.kind = DecoderKind::kMemm;
      memm = train_model(train, memm_options);
    }
    rows.push_back({tmpl, evaluate_model(memm, test, train.vocab), evaluate_model(efb, test, train.vocab)});
  }
  return rows;
}

int run_train(const TrainCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TaggedCorpus corpus = load_corpus(cmd.train);
    TrainSummary summary;
    const Model model = train_model(corpus, cmd.options, &summary);
    save_model(cmd.out, model);
    out << "decoder=" << decoder_name(model.kind) << '\n'
        << "template=" << template_name(model.tmpl) << '\n'
        << "sentences=" << summary.sentences << '\n'
        << "tokens=" << summary.tokens << '\n'
        << "labels=" << summary.labels << '\n'
        << "vocabulary=" << summary.vocabulary << '\n'
        << "features=" << summary.features << '\n';
    if (summary.l_loss) out << "l_loss=" << fixed6(*summary.l_loss) << '\n';
    if (summary.l1_loss) out << "l1_loss=" << fixed6(*summary.l1_loss) << '\n';
    out << "model=" << cmd.out.string() << '\n';
    return kExitOk;
  });
}

int run_tag(const TagCommand& cmd, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Model model = load_model(cmd.model);
    if (!kind_matches(model, cmd.expected_kind, err)) return static_cast<int>(kExitUsage);

    std::ifstream file_in;
    std::istream* source = &in;
    if (cmd.input != "-") {
      file_in.open(cmd.input);
      if (!file_in) throw ParseError(cmd.input, 0, "cannot open input");
      source = &file_in;
    }
    std::ofstream file_out;
    std::ostream* sink = &out;
    if (cmd.output != "-") {
      file_out.open(cmd.output);
      if (!file_out) throw ParseError(cmd.output, 0, "cannot open output");
      sink = &file_out;
    }

    bool first = true;
    for (const auto& sentence : read_plain_sentences(*source)) {
      const auto labels = model.decode_labels(sentence.tokens);
      if (!first) *sink << '\n';
      first = false;
      for (std::size_t t = 0; t < labels.size(); ++t) *sink << sentence.tokens[t] << '\t' << labels[t] << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int run_evaluate(const EvaluateCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Model model = load_model(cmd.model);
    if (!kind_matches(model, cmd.expected_kind, err)) return static_cast<int>(kExitUsage);
    const TaggedCorpus test = load_corpus(cmd.test);
    Vocabulary train_vocab = model.vocab;
    if (cmd.train_vocab) {
      CorpusSource source = cmd.test;
      source.path = *cmd.train_vocab;
      train_vocab = load_corpus(source).vocab;
    }
    const EvalReport report = evaluate_model(model, test, train_vocab);
    const ReportContext context{cmd.test.path.string(), std::string(decoder_name(model.kind)),
                                std::string(template_name(model.tmpl))};
    write_report_table(out, report, context);
    out << '\n';
    write_report_kv(out, report, context);
    if (cmd.report) {
      std::ofstream file(*cmd.report);
      if (!file) throw ParseError(cmd.report->string(), 0, "cannot open report");
      write_report_kv(file, report, context);
    }
    return static_cast<int>(kExitOk);
  });
}

int run_compare(const CompareCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TaggedCorpus train = load_corpus(cmd.train);
    const TaggedCorpus test = load_corpus(cmd.test);
    const auto rows = compare_decoders(train, test, cmd.templates, cmd.options);

    const std::string dataset = cmd.test.path.string();
    out << "POS tagging error (Known Words / Unknown Words / Global) on " << dataset << '\n';
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s%-26s%s\n", "features", "MEMM", "HMC-EFB");
    out << line;
    for (const auto& row : rows) {
      std::string name(template_name(row.tmpl));
      for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      std::snprintf(line, sizeof(line), "%-10s%-26s%s\n", name.c_str(), format_rates(row.memm).c_str(),
                    format_rates(row.efb).c_str());
      out << line;
    }

    std::ostringstream kv;
    for (const auto& row : rows) {
      const std::string tmpl(template_name(row.tmpl));
      write_report_kv(kv, row.memm, {dataset, "memm", tmpl});
      kv << '\n';
      write_report_kv(kv, row.efb, {dataset, "hmc-efb", tmpl});
      kv << '\n';
    }
    out << '\n' << kv.str();
    if (cmd.report) {
      std::ofstream file(*cmd.report);
      if (!file) throw ParseError(cmd.report->string(), 0, "cannot open report");
      file << kv.str();
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace hmctag
