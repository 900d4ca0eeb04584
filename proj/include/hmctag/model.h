#ifndef HMCTAG_MODEL_H_
#define HMCTAG_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmctag/core.h"
#include "hmctag/discrim.h"
#include "hmctag/efb.h"
#include "hmctag/features.h"
#include "hmctag/hmc.h"
#include "hmctag/memm.h"

namespace hmctag {

enum class DecoderKind : std::uint8_t {
  kHmcFb = 0,
  kHmcEfb = 1,
  kMemm = 2,
  kHmcNaiveFeatures = 3,
};

DecoderKind parse_decoder(std::string_view name);
std::string_view decoder_name(DecoderKind kind);

// Which examples train the MEMM's first-position model.
enum class MemmFirstModel : std::uint8_t {
  kShared = 0,   // every position; identical to the HMC-EFB L
  kInitial = 1,  // sentence-initial positions only
};

struct TrainOptions {
  DecoderKind kind = DecoderKind::kHmcEfb;
  FeatureTemplate tmpl = FeatureTemplate::kLF1;
  double delta = kDefaultSmoothing;
  SgdConfig sgd;
  MemmFirstModel memm_first = MemmFirstModel::kShared;
};

// A trained tagger of any kind. Only the blocks the kind uses are filled.
struct Model {
  static constexpr std::uint32_t kFormatVersion = 1;

  DecoderKind kind = DecoderKind::kHmcEfb;
  FeatureTemplate tmpl = FeatureTemplate::kNF;
  TagSet tags;
  Vocabulary vocab;
  FeaturePipeline pipeline;
  HmcParams hmc;                    // hmc-fb (full); pi and trans for the others
  NaiveFeatureEmission naive;       // hmc-naive-features
  LogisticModel l;                  // hmc-efb, memm (first position)
  LogisticModel l1;                 // memm
  double delta = kDefaultSmoothing;
  SgdConfig sgd;

  EfbParams efb_params() const { return {hmc.pi, hmc.trans}; }
  MemmModel memm() const { return {l, l1}; }

  // Label ids for one sentence (empty in, empty out).
  std::vector<LabelId> decode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode_labels(std::span<const std::string> tokens) const;

  bool operator==(const Model&) const = default;
};

struct TrainSummary {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t labels = 0;
  std::size_t vocabulary = 0;
  std::size_t features = 0;
  std::optional<double> l_loss;   // final mean training log-loss of L
  std::optional<double> l1_loss;  // same for L1
};

// Training examples for L (every position) and L1 (positions t >= 2 with the
// gold previous label).
std::vector<TrainingExample> l_examples(const TaggedCorpus& corpus, const FeaturePipeline& pipeline,
                                        bool initial_only = false);
std::vector<TrainingExample> l1_examples(const TaggedCorpus& corpus,
                                         const FeaturePipeline& pipeline);

Model train_model(const TaggedCorpus& corpus, const TrainOptions& options,
                  TrainSummary* summary = nullptr);

// Versioned little-endian binary encoding. The file opens with the magic
// "HMCTAG", the format version, and the decoder kind.
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in, const std::string& source_name = "<stream>");
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace hmctag

#endif  // HMCTAG_MODEL_H_
