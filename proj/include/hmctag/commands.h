#ifndef HMCTAG_COMMANDS_H_
#define HMCTAG_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hmctag/dataio.h"
#include "hmctag/eval.h"
#include "hmctag/model.h"

namespace hmctag {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

// Environment variable naming the default data directory.
inline constexpr const char* kDataDirEnv = "HMCTAG_DATA_DIR";

// `path` as given if it exists or is absolute; otherwise looked up under
// $HMCTAG_DATA_DIR when that is set.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

struct CorpusSource {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::kConllu;
  std::optional<std::filesystem::path> tagmap;
};

TaggedCorpus load_corpus(const CorpusSource& source);

// Decodes every test sentence and buckets tokens by membership in `train_vocab`.
EvalReport evaluate_model(const Model& model, const TaggedCorpus& test,
                          const Vocabulary& train_vocab);

struct TrainCommand {
  CorpusSource train;
  TrainOptions options;
  std::filesystem::path out;
};

struct TagCommand {
  std::filesystem::path model;
  std::optional<DecoderKind> expected_kind;
  std::string input = "-";   // "-" is stdin
  std::string output = "-";  // "-" is stdout
};

struct EvaluateCommand {
  std::filesystem::path model;
  CorpusSource test;
  std::optional<DecoderKind> expected_kind;
  // Corpus whose words count as known; the model's own vocabulary otherwise.
  std::optional<std::filesystem::path> train_vocab;
  std::optional<std::filesystem::path> report;
};

struct CompareCommand {
  CorpusSource train;
  CorpusSource test;
  std::vector<FeatureTemplate> templates;
  TrainOptions options;  // kind and tmpl are overridden per run
  std::optional<std::filesystem::path> report;
};

struct CompareRow {
  FeatureTemplate tmpl;
  EvalReport memm;
  EvalReport efb;
};

// Trains MEMM and HMC-EFB per template on one shared pipeline and config.
std::vector<CompareRow> compare_decoders(const TaggedCorpus& train, const TaggedCorpus& test,
                                         const std::vector<FeatureTemplate>& templates,
                                         const TrainOptions& options);

// Each command maps exceptions to exit codes and writes diagnostics to `err`.
int run_train(const TrainCommand& cmd, std::ostream& out, std::ostream& err);
int run_tag(const TagCommand& cmd, std::istream& in, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateCommand& cmd, std::ostream& out, std::ostream& err);
int run_compare(const CompareCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace hmctag

#endif  // HMCTAG_COMMANDS_H_
