#include "hmctag/features.h"

#include <algorithm>
#include <cctype>
#include <locale>
#include <memory>

#include "hmctag/error.h"

namespace hmctag {

namespace {

constexpr Family kNfFamilies[] = {Family::kWord};
constexpr Family kLf1Families[] = {
    Family::kWord,    Family::kSuffix3,       Family::kSuffix2,       Family::kPrefix3,
    Family::kPrefix2, Family::kFirstPosition, Family::kFirstLetterUp,
};
constexpr Family kLf2Families[] = {
    Family::kWord,    Family::kSuffix3,       Family::kSuffix2,       Family::kPrefix3,
    Family::kPrefix2, Family::kFirstPosition, Family::kFirstLetterUp, Family::kSuffix5,
    Family::kSuffix4, Family::kPrefix5,       Family::kPrefix4,       Family::kHasDigit,
    Family::kHasHyphen,
};

// Byte length of the UTF-8 sequence starting with `lead`; 1 for bytes that
// cannot start a sequence.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

// Byte offsets of every code point start, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  while (pos < s.size()) {
    offsets.push_back(pos);
    pos = std::min(s.size(), pos + utf8_length(static_cast<unsigned char>(s[pos])));
  }
  offsets.push_back(s.size());
  return offsets;
}

char32_t decode_first(std::string_view s) {
  const auto lead = static_cast<unsigned char>(s[0]);
  const std::size_t len = utf8_length(lead);
  if (len == 1 || len > s.size()) return lead;
  char32_t cp = lead & (0x7F >> len);
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[k]) & 0x3F);
  return cp;
}

const std::ctype<wchar_t>* unicode_ctype() {
  static const std::unique_ptr<std::locale> locale = []() -> std::unique_ptr<std::locale> {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::make_unique<std::locale>(name);
      } catch (const std::runtime_error&) {
      }
    }
    return nullptr;
  }();
  return locale ? &std::use_facet<std::ctype<wchar_t>>(*locale) : nullptr;
}

std::string prefix(std::string_view token, const std::vector<std::size_t>& offsets, std::size_t n) {
  const std::size_t count = offsets.size() - 1;
  return std::string(token.substr(0, offsets[std::min(n, count)]));
}

std::string suffix(std::string_view token, const std::vector<std::size_t>& offsets, std::size_t n) {
  const std::size_t count = offsets.size() - 1;
  return std::string(token.substr(offsets[count - std::min(n, count)]));
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kWord: return "word";
    case Family::kSuffix3: return "suffix-3";
    case Family::kSuffix2: return "suffix-2";
    case Family::kPrefix3: return "prefix-3";
    case Family::kPrefix2: return "prefix-2";
    case Family::kFirstPosition: return "first-position";
    case Family::kFirstLetterUp: return "first-letter-up";
    case Family::kSuffix5: return "suffix-5";
    case Family::kSuffix4: return "suffix-4";
    case Family::kPrefix5: return "prefix-5";
    case Family::kPrefix4: return "prefix-4";
    case Family::kHasDigit: return "has-digit";
    case Family::kHasHyphen: return "has-hyphen";
  }
  return "?";
}

std::string_view template_name(FeatureTemplate tmpl) {
  switch (tmpl) {
    case FeatureTemplate::kNF: return "nf";
    case FeatureTemplate::kLF1: return "lf1";
    case FeatureTemplate::kLF2: return "lf2";
  }
  return "?";
}

FeatureTemplate parse_template(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nf") return FeatureTemplate::kNF;
  if (lower == "lf1") return FeatureTemplate::kLF1;
  if (lower == "lf2") return FeatureTemplate::kLF2;
  throw InvalidInput("unknown feature template: " + std::string(name));
}

std::span<const Family> template_families(FeatureTemplate tmpl) {
  switch (tmpl) {
    case FeatureTemplate::kNF: return kNfFamilies;
    case FeatureTemplate::kLF1: return kLf1Families;
    case FeatureTemplate::kLF2: return kLf2Families;
  }
  throw InvalidInput("bad feature template");
}

bool first_letter_up(std::string_view token) {
  if (token.empty()) return false;
  const char32_t cp = decode_first(token);
  if (cp < 0x80) return cp >= 'A' && cp <= 'Z';
  const auto* ctype = unicode_ctype();
  if (ctype == nullptr) return false;
  return ctype->is(std::ctype_base::upper, static_cast<wchar_t>(cp));
}

StringFeatures extract(std::string_view token, std::size_t position, FeatureTemplate tmpl) {
  if (token.empty()) throw InvalidInput("cannot extract features from an empty token");
  const auto offsets = code_point_offsets(token);
  StringFeatures out;
  out.reserve(template_families(tmpl).size());
  for (Family family : template_families(tmpl)) {
    std::string value;
    switch (family) {
      case Family::kWord: value = std::string(token); break;
      case Family::kSuffix2: value = suffix(token, offsets, 2); break;
      case Family::kSuffix3: value = suffix(token, offsets, 3); break;
      case Family::kSuffix4: value = suffix(token, offsets, 4); break;
      case Family::kSuffix5: value = suffix(token, offsets, 5); break;
      case Family::kPrefix2: value = prefix(token, offsets, 2); break;
      case Family::kPrefix3: value = prefix(token, offsets, 3); break;
      case Family::kPrefix4: value = prefix(token, offsets, 4); break;
      case Family::kPrefix5: value = prefix(token, offsets, 5); break;
      case Family::kFirstPosition: value = boolean(position == 0); break;
      case Family::kFirstLetterUp: value = boolean(first_letter_up(token)); break;
      case Family::kHasDigit:
        value = boolean(std::any_of(token.begin(), token.end(),
                                    [](char c) { return c >= '0' && c <= '9'; }));
        break;
      case Family::kHasHyphen: value = boolean(token.find('-') != std::string_view::npos); break;
    }
    out.emplace_back(family, std::move(value));
  }
  return out;
}

FeatureIndex FeatureIndex::build(const TaggedCorpus& corpus, FeatureTemplate tmpl) {
  FeatureIndex index;
  for (const auto& sentence : corpus.sentences)
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t)
      for (const auto& [family, value] : extract(sentence.tokens[t], t, tmpl)) index.add(family, value);
  index.freeze(template_families(tmpl));
  return index;
}

FeatureIndex FeatureIndex::from_entries(std::vector<std::pair<Family, std::string>> entries,
                                        std::vector<bool> is_unknown) {
  if (entries.size() != is_unknown.size()) throw InvalidInput("feature index entry mismatch");
  FeatureIndex index;
  for (std::size_t id = 0; id < entries.size(); ++id) {
    const auto f = static_cast<std::size_t>(entries[id].first);
    if (f >= kNumFamilies) throw InvalidInput("feature index has an invalid family");
    if (is_unknown[id]) {
      if (index.unknown_[f] >= 0) throw InvalidInput("feature family has two unknown ids");
      index.unknown_[f] = static_cast<std::int64_t>(id);
    } else if (!index.values_[f].emplace(entries[id].second, static_cast<std::uint32_t>(id)).second) {
      throw InvalidInput("duplicate feature value in index");
    }
  }
  for (std::size_t f = 0; f < kNumFamilies; ++f)
    if (!index.values_[f].empty() && index.unknown_[f] < 0)
      throw InvalidInput("feature family without an unknown id");
  index.entries_ = std::move(entries);
  index.is_unknown_ = std::move(is_unknown);
  return index;
}

void FeatureIndex::add(Family family, const std::string& value) {
  auto& values = values_[static_cast<std::size_t>(family)];
  if (values.count(value)) return;
  values.emplace(value, static_cast<std::uint32_t>(entries_.size()));
  entries_.emplace_back(family, value);
  is_unknown_.push_back(false);
}

void FeatureIndex::freeze(std::span<const Family> families) {
  for (Family family : families) {
    unknown_[static_cast<std::size_t>(family)] = static_cast<std::int64_t>(entries_.size());
    entries_.emplace_back(family, std::string());
    is_unknown_.push_back(true);
  }
}

bool FeatureIndex::has_family(Family family) const {
  const auto f = static_cast<std::size_t>(family);
  return f < kNumFamilies && unknown_[f] >= 0;
}

std::uint32_t FeatureIndex::unknown_id(Family family) const {
  if (!has_family(family))
    throw InvalidInput("feature family " + std::string(family_name(family)) + " is not indexed");
  return static_cast<std::uint32_t>(unknown_[static_cast<std::size_t>(family)]);
}

std::uint32_t FeatureIndex::lookup(Family family, std::string_view value) const {
  const std::uint32_t unknown = unknown_id(family);
  const auto& values = values_[static_cast<std::size_t>(family)];
  auto it = values.find(std::string(value));
  return it == values.end() ? unknown : it->second;
}

FeatureVector vectorize(const StringFeatures& features, const FeatureIndex& index) {
  FeatureVector out;
  out.active.reserve(features.size());
  for (const auto& [family, value] : features) out.active.push_back({family, index.lookup(family, value)});
  return out;
}

FeaturePipeline FeaturePipeline::build(const TaggedCorpus& corpus, FeatureTemplate tmpl) {
  return {tmpl, FeatureIndex::build(corpus, tmpl)};
}

std::vector<FeatureVector> FeaturePipeline::apply(std::span<const std::string> tokens) const {
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) out.push_back(vectorize(extract(tokens[t], t, tmpl), index));
  return out;
}

}  // namespace hmctag
