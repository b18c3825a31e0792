#ifndef DANTOOLS_SEQTAG_H_
#define DANTOOLS_SEQTAG_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dantools/brown.h"
#include "dantools/conllu.h"

namespace dantools {

enum class Scheme { kBio, kPlain, kTransition };

const char* SchemeName(Scheme scheme);

// A closed, ordered label inventory. Label order is also the tie-break
// order during decoding.
class TagSet {
 public:
  TagSet() = default;
  TagSet(Scheme scheme, std::vector<std::string> labels);

  // O, B-PER, I-PER, B-LOC, I-LOC, B-ORG, I-ORG.
  static TagSet Ner();
  // O followed by B-T, I-T for each entity type.
  static TagSet Bio(const std::vector<std::string>& types);
  // The 17 UPOS tags.
  static TagSet Upos();

  Scheme scheme() const { return scheme_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(int i) const { return labels_[i]; }
  // -1 if absent.
  int Index(std::string_view label) const;

  // Whether label `next` may follow `prev` (-1 for the sentence start).
  // Only BIO restricts anything: I-T must follow B-T or I-T.
  bool Allowed(int prev, int next) const;

  bool operator==(const TagSet& other) const {
    return scheme_ == other.scheme_ && labels_ == other.labels_;
  }

 private:
  Scheme scheme_ = Scheme::kPlain;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  // For BIO: entity type of each label ("" for O), and whether it is I-.
  std::vector<std::string> type_;
  std::vector<bool> inside_;
};

// True when no I-T appears without an immediately preceding B-T or I-T.
bool IsBioValid(std::span<const std::string> labels);

// Full shape (X/x/d per character, other characters kept) and the same with
// runs of identical shape characters collapsed.
std::pair<std::string, std::string> WordShape(std::string_view form);

using FeatureVector = std::vector<std::string>;

// Namespaced features for position i. Out-of-range context positions are
// padded with "<s>" / "</s>". Throws Error(PositionOutOfRange).
FeatureVector ExtractFeatures(std::span<const std::string> forms,
                              std::size_t i,
                              const brown::PathTable* clusters);

// Sparse per-(feature, label) emission weights plus first-order label
// transitions with a distinguished start row. Absent keys weigh zero.
class LinearModel {
 public:
  LinearModel() = default;
  explicit LinearModel(TagSet tags);

  const TagSet& tags() const { return tags_; }

  double Emission(const std::string& feature, int label) const;
  // prev == -1 is the start state.
  double Transition(int prev, int label) const;

  // Per-label sum of emission weights over `features`.
  std::vector<double> Scores(const FeatureVector& features) const;

  std::vector<double>& MutableEmission(const std::string& feature);
  double& MutableTransition(int prev, int label);

  // Number of nonzero weights.
  std::size_t NonZero() const;

  void Write(std::ostream& out) const;
  // Throws Error(BadModel) with a line number for malformed files.
  static LinearModel Read(std::istream& in);
  static LinearModel Load(const std::string& path);
  void Save(const std::string& path) const;

  bool operator==(const LinearModel& other) const;

 private:
  friend class AveragedPerceptron;

  TagSet tags_;
  std::unordered_map<std::string, std::vector<double>> emission_;
  // (labels + 1) x labels, row 0 is the start state.
  std::vector<double> transition_;
};

// Weights plus the accumulators needed to return the average of the weight
// vector over every training step.
class AveragedPerceptron {
 public:
  explicit AveragedPerceptron(TagSet tags) : current_(tags), sums_(tags) {}

  const LinearModel& current() const { return current_; }

  void UpdateEmission(const std::string& feature, int label, double delta);
  void UpdateTransition(int prev, int label, double delta);
  // Closes one training step.
  void Tick() { ++steps_; }

  LinearModel Averaged() const;

 private:
  LinearModel current_;
  LinearModel sums_;  // sum of step * delta per weight
  std::int64_t steps_ = 0;
};

// Highest-scoring label sequence under emission plus transition scores.
// Forbidden BIO transitions are excluded; ties go to the earlier label.
// Throws Error(EmptyInput).
std::vector<int> Viterbi(const LinearModel& model,
                         const std::vector<FeatureVector>& features);

// Total score of a label sequence, -infinity if it breaks BIO constraints.
double SequenceScore(const LinearModel& model,
                     const std::vector<FeatureVector>& features,
                     std::span<const int> labels);

struct TaggedSentence {
  std::vector<std::string> forms;
  std::vector<std::string> labels;
};

struct TrainOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
  // Called after each epoch with the online token accuracy of that epoch.
  std::function<void(int epoch, double accuracy)> progress;
};

// Averaged structured perceptron. Throws Error(InvalidGold) for labels
// outside the tag set or BIO-invalid gold sequences.
LinearModel TrainTagger(const std::vector<TaggedSentence>& examples,
                        const TagSet& tags, const brown::PathTable* clusters,
                        const TrainOptions& options);

// Throws Error(EmptyInput) for an empty sentence.
std::vector<std::string> Tag(const LinearModel& model,
                             const brown::PathTable* clusters,
                             std::span<const std::string> forms);

// Seeded Fisher-Yates permutation of 0..n-1, identical on every platform.
std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed,
                                       int epoch);

// Lemma and features by (form, UPOS), learned from annotated sentences.
class MorphLexicon {
 public:
  struct Analysis {
    std::string lemma;
    std::string feats;

    bool operator==(const Analysis&) const = default;
  };

  void Add(const std::string& form, const std::string& upos,
           const std::string& lemma, const std::string& feats,
           std::int64_t count = 1);
  static MorphLexicon Build(const std::vector<ConlluSentence>& sentences);

  // Most frequent analysis for (form, upos); then for the lowercased form
  // with the same UPOS; then the most frequent lemma of the lowercased form
  // under any UPOS with feats "_"; finally (lowercased form, "_").
  Analysis Lookup(const std::string& form, const std::string& upos) const;

  std::size_t size() const { return counts_.size(); }

  // "form<TAB>upos<TAB>lemma<TAB>feats<TAB>count" lines.
  void Write(std::ostream& out) const;
  // Throws Error(BadLine) with a line number.
  static MorphLexicon Read(std::istream& in);
  static MorphLexicon Load(const std::string& path);

  bool operator==(const MorphLexicon& other) const {
    return counts_ == other.counts_;
  }

 private:
  using Key = std::pair<std::string, std::string>;
  using Tally = std::map<std::pair<std::string, std::string>, std::int64_t>;

  static std::optional<Analysis> Best(const std::map<Key, Tally>& table,
                                      const Key& key);

  std::map<Key, Tally> counts_;  // (form, upos) -> (lemma, feats) -> n
  std::map<Key, Tally> folded_;  // (lower form, upos) -> ...
  std::map<std::string, std::map<std::string, std::int64_t>> lemmas_;
};

}  // namespace dantools

#endif  // DANTOOLS_SEQTAG_H_
