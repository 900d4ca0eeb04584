// Command-line front end: train | tag | evaluate | compare.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hmctag/commands.h"
#include "hmctag/error.h"

namespace {

using namespace hmctag;

struct SharedFlags {
  std::string format = "conllu";
  std::string tagmap;
  std::string decoder;
  std::string features = "lf1";
  std::uint64_t seed = 42;
  int epochs = 20;
  double lr = 0.1;
  double decay = 0.05;
  double l2 = 1e-5;
  std::size_t batch = 32;
  double delta = kDefaultSmoothing;
  std::string memm_first = "shared";
};

void add_corpus_flags(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--format", flags.format, "Corpus layout")
      ->check(CLI::IsMember({"conll2000", "conll2003", "conllu"}))
      ->capture_default_str();
  cmd->add_option("--tagmap", flags.tagmap, "Two-column tag mapping file applied to the POS column");
}

void add_training_flags(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--seed", flags.seed, "SGD shuffle seed")->capture_default_str();
  cmd->add_option("--epochs", flags.epochs, "SGD epochs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr", flags.lr, "Initial learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--decay", flags.decay, "Learning-rate decay per epoch")->capture_default_str();
  cmd->add_option("--l2", flags.l2, "L2 strength")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--batch", flags.batch, "Mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--delta", flags.delta, "Additive smoothing for pi, a, b")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--memm-l0", flags.memm_first,
                  "MEMM first-position model: shared (all positions) or initial")
      ->check(CLI::IsMember({"shared", "initial"}))
      ->capture_default_str();
}

CorpusSource corpus_source(const std::string& path, const SharedFlags& flags) {
  CorpusSource source{path, parse_format(flags.format), std::nullopt};
  if (!flags.tagmap.empty()) source.tagmap = flags.tagmap;
  return source;
}

TrainOptions train_options(const SharedFlags& flags) {
  TrainOptions options;
  if (!flags.decoder.empty()) options.kind = parse_decoder(flags.decoder);
  options.tmpl = parse_template(flags.features);
  options.delta = flags.delta;
  options.sgd.seed = flags.seed;
  options.sgd.epochs = flags.epochs;
  options.sgd.learning_rate = flags.lr;
  options.sgd.decay = flags.decay;
  options.sgd.l2 = flags.l2;
  options.sgd.batch_size = flags.batch;
  options.memm_first = flags.memm_first == "initial" ? MemmFirstModel::kInitial : MemmFirstModel::kShared;
  return options;
}

std::vector<FeatureTemplate> template_list(const std::string& spec) {
  std::vector<FeatureTemplate> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_template(item));
  if (out.empty()) throw InvalidInput("empty feature template list");
  return out;
}

const auto kDecoders = CLI::IsMember({"hmc-fb", "hmc-efb", "memm", "hmc-naive-features"});
const auto kTemplates = CLI::IsMember({"nf", "lf1", "lf2"});

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden Markov chain / MEMM sequence tagger with posterior-mode decoding"};
  app.require_subcommand(1);
  SharedFlags flags;

  std::string train_path, model_path, test_path, out_path, input = "-", output = "-", report, train_vocab;

  auto* train = app.add_subcommand("train", "Train a model and write it to --out");
  train->add_option("train", train_path, "Training corpus")->required();
  add_corpus_flags(train, flags);
  train->add_option("--decoder", flags.decoder, "Decoder kind")->check(kDecoders)->required();
  train->add_option("--features", flags.features, "Feature template")->check(kTemplates)->capture_default_str();
  add_training_flags(train, flags);
  train->add_option("--out", out_path, "Model file to write")->required();

  auto* tag = app.add_subcommand("tag", "Tag whitespace-tokenized sentences, one per line");
  tag->add_option("model", model_path, "Model file")->required();
  tag->add_option("--decoder", flags.decoder, "Expected decoder kind")->check(kDecoders);
  tag->add_option("--input", input, "Input file, '-' for stdin")->capture_default_str();
  tag->add_option("--output", output, "Output file, '-' for stdout")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Known/unknown/global error rates on a test corpus");
  evaluate->add_option("model", model_path, "Model file")->required();
  evaluate->add_option("test", test_path, "Test corpus")->required();
  add_corpus_flags(evaluate, flags);
  evaluate->add_option("--decoder", flags.decoder, "Expected decoder kind")->check(kDecoders);
  evaluate->add_option("--train-vocab", train_vocab,
                       "Corpus defining known words (default: the model's training vocabulary)");
  evaluate->add_option("--report", report, "Write the key=value report here");

  std::string template_spec = "nf,lf1,lf2";
  auto* compare = app.add_subcommand("compare", "MEMM vs HMC-EFB on shared features and settings");
  compare->add_option("train", train_path, "Training corpus")->required();
  compare->add_option("test", test_path, "Test corpus")->required();
  add_corpus_flags(compare, flags);
  compare->add_option("--features", template_spec, "Comma-separated templates")->capture_default_str();
  add_training_flags(compare, flags);
  compare->add_option("--report", report, "Write the key=value reports here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      return run_train({corpus_source(train_path, flags), train_options(flags), out_path}, std::cout,
                       std::cerr);
    }
    if (*tag) {
      TagCommand cmd{model_path, std::nullopt, input, output};
      if (!flags.decoder.empty()) cmd.expected_kind = parse_decoder(flags.decoder);
      return run_tag(cmd, std::cin, std::cout, std::cerr);
    }
    if (*evaluate) {
      EvaluateCommand cmd{model_path, corpus_source(test_path, flags), std::nullopt, std::nullopt,
                          std::nullopt};
      if (!flags.decoder.empty()) cmd.expected_kind = parse_decoder(flags.decoder);
      if (!train_vocab.empty()) cmd.train_vocab = train_vocab;
      if (!report.empty()) cmd.report = report;
      return run_evaluate(cmd, std::cout, std::cerr);
    }
    if (*compare) {
      CompareCommand cmd{corpus_source(train_path, flags), corpus_source(test_path, flags),
                         template_list(template_spec), train_options(flags), std::nullopt};
      if (!report.empty()) cmd.report = report;
      return run_compare(cmd, std::cout, std::cerr);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
