#ifndef HMCTAG_CORE_H_
#define HMCTAG_CORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hmctag {

using LabelId = int;
using WordId = int;

// Dense row-major matrix of doubles.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Table&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Bidirectional label <-> dense id map. Ids are assigned in insertion order.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(const std::vector<std::string>& labels);

  // Returns the id of `label`, adding it if new.
  LabelId intern(std::string_view label);
  std::optional<LabelId> find(std::string_view label) const;
  // Throws InvalidInput when absent.
  LabelId id(std::string_view label) const;
  const std::string& label(LabelId id) const;

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const TagSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, LabelId> index_;
};

// Word <-> id map over exact surface forms. The unknown-word id is size().
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& words);

  WordId intern(std::string_view word);
  // Unknown words map to unknown_id().
  WordId id(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(WordId id) const;

  WordId unknown_id() const { return static_cast<WordId>(words_.size()); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Sentence {
  std::vector<std::string> tokens;
};

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<LabelId> labels;
};

// Sentences plus the label and word indices built while reading them.
struct TaggedCorpus {
  std::vector<LabeledSentence> sentences;
  TagSet tags;
  Vocabulary vocab;

  std::size_t token_count() const;
};

// Maps every token of `sentence` through `vocab` (unknowns to unknown_id()).
std::vector<WordId> word_ids(const Vocabulary& vocab, std::span<const std::string> tokens);

// T x N table of posterior marginals P(X_t = i | observations).
class PosteriorLattice {
 public:
  PosteriorLattice() = default;
  explicit PosteriorLattice(Table values);

  std::size_t length() const { return values_.rows(); }
  std::size_t num_labels() const { return values_.cols(); }
  double operator()(std::size_t t, std::size_t i) const { return values_(t, i); }
  std::span<const double> row(std::size_t t) const { return values_.row(t); }
  const Table& values() const { return values_; }

 private:
  Table values_;
};

// Index of the largest entry; ties go to the lowest index.
LabelId argmax(std::span<const double> values);

// Per-position argmax of the lattice (maximum posterior mode).
std::vector<LabelId> mpm_from_lattice(const PosteriorLattice& lattice);

}  // namespace hmctag

#endif  // HMCTAG_CORE_H_
