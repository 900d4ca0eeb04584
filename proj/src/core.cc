#include "hmctag/core.h"

#include <cmath>

#include "hmctag/error.h"

namespace hmctag {

TagSet::TagSet(const std::vector<std::string>& labels) {
  for (const auto& label : labels) {
    if (index_.count(label)) throw InvalidInput("duplicate label: " + label);
    intern(label);
  }
}

LabelId TagSet::intern(std::string_view label) {
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<LabelId>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

std::optional<LabelId> TagSet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelId TagSet::id(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw InvalidInput("unknown label: " + std::string(label));
}

const std::string& TagSet::label(LabelId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size())
    throw InvalidInput("label id out of range: " + std::to_string(id));
  return labels_[static_cast<std::size_t>(id)];
}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  for (const auto& word : words) {
    if (index_.count(word)) throw InvalidInput("duplicate word: " + word);
    intern(word);
  }
}

WordId Vocabulary::intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unknown_id() : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.count(std::string(word)) != 0;
}

const std::string& Vocabulary::word(WordId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size())
    throw InvalidInput("word id out of range: " + std::to_string(id));
  return words_[static_cast<std::size_t>(id)];
}

std::size_t TaggedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::vector<WordId> word_ids(const Vocabulary& vocab, std::span<const std::string> tokens) {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) ids.push_back(vocab.id(token));
  return ids;
}

PosteriorLattice::PosteriorLattice(Table values) : values_(std::move(values)) {
  for (std::size_t t = 0; t < values_.rows(); ++t) {
    double sum = 0.0;
    for (double p : values_.row(t)) {
      if (!(p >= 0.0 && p <= 1.0 + 1e-12))
        throw InvalidInput("lattice entry outside [0,1] at position " + std::to_string(t));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidInput("lattice row not normalized at position " + std::to_string(t));
  }
}

LabelId argmax(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<LabelId>(best);
}

std::vector<LabelId> mpm_from_lattice(const PosteriorLattice& lattice) {
  if (lattice.length() == 0 || lattice.num_labels() == 0)
    throw InvalidInput("empty posterior lattice");
  std::vector<LabelId> out;
  out.reserve(lattice.length());
  for (std::size_t t = 0; t < lattice.length(); ++t) out.push_back(argmax(lattice.row(t)));
  return out;
}

}  // namespace hmctag
