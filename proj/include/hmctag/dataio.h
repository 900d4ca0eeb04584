#ifndef HMCTAG_DATAIO_H_
#define HMCTAG_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hmctag/core.h"

namespace hmctag {

// conll2000: "word POS chunk"; conll2003: "word POS chunk NER";
// conllu: ten tab-separated columns, FORM and UPOS are used.
enum class CorpusFormat : std::uint8_t { kConll2000, kConll2003, kConllu };

CorpusFormat parse_format(std::string_view name);
std::string_view format_name(CorpusFormat format);

// Source tag -> target tag, e.g. a treebank tagset onto universal tags.
class TagMap {
 public:
  TagMap() = default;

  // "source<TAB>target" per line; '#' starts a comment line.
  static TagMap load(const std::filesystem::path& path);
  static TagMap parse(std::istream& in, const std::string& source_name);

  std::optional<std::string> map(std::string_view tag) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

TaggedCorpus read_corpus(const std::filesystem::path& path, CorpusFormat format,
                         const TagMap* tagmap = nullptr);
TaggedCorpus read_corpus(std::istream& in, CorpusFormat format, const TagMap* tagmap = nullptr,
                         const std::string& source_name = "<stream>");

// Plain text, one sentence per line, whitespace-separated tokens. Blank lines
// are skipped.
std::vector<Sentence> read_plain_sentences(std::istream& in);

// flags[s][t] is true when token t of sentence s is not in `train_vocab`.
std::vector<std::vector<bool>> split_known_unknown(const std::vector<LabeledSentence>& sentences,
                                                   const Vocabulary& train_vocab);

}  // namespace hmctag

#endif  // HMCTAG_DATAIO_H_
