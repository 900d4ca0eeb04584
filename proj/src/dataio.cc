#include "hmctag/dataio.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "hmctag/error.h"

namespace hmctag {

namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) out.emplace_back(line.substr(start, pos - start));
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    if (c < 0x80) len = 1;
    else if ((c >> 5) == 0x6 && c >= 0xC2) len = 2;
    else if ((c >> 4) == 0xE) len = 3;
    else if ((c >> 3) == 0x1E && c <= 0xF4) len = 4;
    else return false;
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += len;
  }
  return true;
}

struct PendingSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

}  // namespace

CorpusFormat parse_format(std::string_view name) {
  if (name == "conll2000") return CorpusFormat::kConll2000;
  if (name == "conll2003") return CorpusFormat::kConll2003;
  if (name == "conllu") return CorpusFormat::kConllu;
  throw InvalidInput("unknown corpus format: " + std::string(name));
}

std::string_view format_name(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kConll2000: return "conll2000";
    case CorpusFormat::kConll2003: return "conll2003";
    case CorpusFormat::kConllu: return "conllu";
  }
  return "?";
}

TagMap TagMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open tag map");
  return parse(in, path.string());
}

TagMap TagMap::parse(std::istream& in, const std::string& source_name) {
  TagMap tagmap;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line) || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw ParseError(source_name, line_no, "expected \"source<TAB>target\"");
    if (!tagmap.map_.emplace(fields[0], fields[1]).second)
      throw ParseError(source_name, line_no, "duplicate source tag " + fields[0]);
  }
  return tagmap;
}

std::optional<std::string> TagMap::map(std::string_view tag) const {
  auto it = map_.find(std::string(tag));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

TaggedCorpus read_corpus(const std::filesystem::path& path, CorpusFormat format,
                         const TagMap* tagmap) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open corpus file");
  return read_corpus(in, format, tagmap, path.string());
}

TaggedCorpus read_corpus(std::istream& in, CorpusFormat format, const TagMap* tagmap,
                         const std::string& source_name) {
  std::vector<PendingSentence> pending;
  PendingSentence current;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    const bool docstart = format == CorpusFormat::kConll2003 && current.tokens[0] == "-DOCSTART-";
    if (!docstart) pending.push_back(std::move(current));
    current = {};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!valid_utf8(line)) throw ParseError(source_name, line_no, "invalid UTF-8");
    if (is_blank(line)) {
      flush();
      continue;
    }
    switch (format) {
      case CorpusFormat::kConll2000:
      case CorpusFormat::kConll2003: {
        const auto fields = split_whitespace(line);
        const std::size_t expected = format == CorpusFormat::kConll2000 ? 3 : 4;
        if (fields.size() != expected)
          throw ParseError(source_name, line_no,
                           "expected " + std::to_string(expected) + " columns, found " +
                               std::to_string(fields.size()));
        current.tokens.push_back(fields[0]);
        current.tags.push_back(fields[1]);
        break;
      }
      case CorpusFormat::kConllu: {
        if (line[0] == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 10)
          throw ParseError(source_name, line_no,
                           "expected 10 tab-separated columns, found " + std::to_string(fields.size()));
        if (fields[0].find_first_of("-.") != std::string::npos) continue;
        if (fields[1].empty() || fields[3].empty())
          throw ParseError(source_name, line_no, "empty FORM or UPOS");
        current.tokens.push_back(fields[1]);
        current.tags.push_back(fields[3]);
        break;
      }
    }
  }
  flush();

  if (tagmap != nullptr) {
    std::set<std::string> unmapped;
    for (auto& s : pending)
      for (auto& tag : s.tags) {
        if (auto target = tagmap->map(tag)) tag = *target;
        else unmapped.insert(tag);
      }
    if (!unmapped.empty()) {
      std::string list;
      for (const auto& tag : unmapped) list += (list.empty() ? "" : ", ") + tag;
      throw ParseError(source_name, 0, "tags missing from the tag map: " + list);
    }
  }

  TaggedCorpus corpus;
  corpus.sentences.reserve(pending.size());
  for (auto& s : pending) {
    LabeledSentence sentence;
    sentence.labels.reserve(s.tags.size());
    for (const auto& tag : s.tags) sentence.labels.push_back(corpus.tags.intern(tag));
    for (const auto& token : s.tokens) corpus.vocab.intern(token);
    sentence.tokens = std::move(s.tokens);
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

std::vector<Sentence> read_plain_sentences(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    auto tokens = split_whitespace(line);
    if (!tokens.empty()) out.push_back({std::move(tokens)});
  }
  return out;
}

std::vector<std::vector<bool>> split_known_unknown(const std::vector<LabeledSentence>& sentences,
                                                   const Vocabulary& train_vocab) {
  std::vector<std::vector<bool>> flags;
  flags.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<bool> row;
    row.reserve(s.tokens.size());
    for (const auto& token : s.tokens) row.push_back(!train_vocab.contains(token));
    flags.push_back(std::move(row));
  }
  return flags;
}

}  // namespace hmctag
