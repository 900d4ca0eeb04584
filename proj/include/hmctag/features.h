#ifndef HMCTAG_FEATURES_H_
#define HMCTAG_FEATURES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hmctag/core.h"

namespace hmctag {

enum class FeatureTemplate : std::uint8_t { kNF = 0, kLF1 = 1, kLF2 = 2 };

// Token-level feature families. Values are stable: they are serialized.
enum class Family : std::uint8_t {
  kWord = 0,
  kSuffix3,
  kSuffix2,
  kPrefix3,
  kPrefix2,
  kFirstPosition,
  kFirstLetterUp,
  kSuffix5,
  kSuffix4,
  kPrefix5,
  kPrefix4,
  kHasDigit,
  kHasHyphen,
};

inline constexpr std::size_t kNumFamilies = 13;

std::string_view family_name(Family family);
std::string_view template_name(FeatureTemplate tmpl);
// Accepts "nf", "lf1", "lf2" (case-insensitive). Throws InvalidInput.
FeatureTemplate parse_template(std::string_view name);

// Families emitted by `tmpl`, in extraction order.
std::span<const Family> template_families(FeatureTemplate tmpl);

// String-valued features of one token, one entry per family.
using StringFeatures = std::vector<std::pair<Family, std::string>>;

struct ActiveFeature {
  Family family;
  std::uint32_t id;
  bool operator==(const ActiveFeature&) const = default;
};

// Id-valued features of one token, at most one per family.
struct FeatureVector {
  std::vector<ActiveFeature> active;
  bool operator==(const FeatureVector&) const = default;
};

// First code point is an uppercase letter.
bool first_letter_up(std::string_view token);

// Features of `token` at 0-based `position`. Affixes longer than the token
// collapse to the whole token; lengths count code points.
StringFeatures extract(std::string_view token, std::size_t position, FeatureTemplate tmpl);

// Dense ids for every (family, value) seen in training plus one unknown id
// per family. Ids are assigned in first-seen order; unknown ids come last.
class FeatureIndex {
 public:
  FeatureIndex() { unknown_.fill(-1); }

  static FeatureIndex build(const TaggedCorpus& corpus, FeatureTemplate tmpl);
  // Rebuilds from serialized entries: entries[id] = (family, value); unknown
  // ids are marked by `is_unknown`.
  static FeatureIndex from_entries(std::vector<std::pair<Family, std::string>> entries,
                                   std::vector<bool> is_unknown);

  // Seen value -> its id; unseen value -> family unknown id. Throws
  // InvalidInput if `family` was not indexed.
  std::uint32_t lookup(Family family, std::string_view value) const;
  std::uint32_t unknown_id(Family family) const;
  bool has_family(Family family) const;

  std::size_t size() const { return entries_.size(); }
  Family family_of(std::uint32_t id) const { return entries_[id].first; }
  const std::vector<std::pair<Family, std::string>>& entries() const { return entries_; }
  const std::vector<bool>& is_unknown() const { return is_unknown_; }

  bool operator==(const FeatureIndex& other) const {
    return entries_ == other.entries_ && is_unknown_ == other.is_unknown_;
  }

 private:
  void add(Family family, const std::string& value);
  void freeze(std::span<const Family> families);

  std::vector<std::pair<Family, std::string>> entries_;
  std::vector<bool> is_unknown_;
  std::array<std::unordered_map<std::string, std::uint32_t>, kNumFamilies> values_;
  std::array<std::int64_t, kNumFamilies> unknown_;
};

FeatureVector vectorize(const StringFeatures& features, const FeatureIndex& index);

// Template plus frozen index: turns a token sequence into feature vectors.
struct FeaturePipeline {
  FeatureTemplate tmpl = FeatureTemplate::kNF;
  FeatureIndex index;

  static FeaturePipeline build(const TaggedCorpus& corpus, FeatureTemplate tmpl);
  std::vector<FeatureVector> apply(std::span<const std::string> tokens) const;

  bool operator==(const FeaturePipeline&) const = default;
};

}  // namespace hmctag

#endif  // HMCTAG_FEATURES_H_
