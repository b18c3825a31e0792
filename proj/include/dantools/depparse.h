#ifndef DANTOOLS_DEPPARSE_H_
#define DANTOOLS_DEPPARSE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "dantools/conllu.h"
#include "dantools/seqtag.h"

namespace dantools::depparse {

inline constexpr const char* kRootLabel = "root";
inline constexpr const char* kFallbackLabel = "dep";

// Token i (1-based) is stored at index i - 1; 0 denotes the virtual root.
struct DepTree {
  std::vector<int> heads;
  std::vector<std::string> labels;

  std::size_t size() const { return heads.size(); }
  bool operator==(const DepTree&) const = default;
};

// Single root labelled "root", heads in range, acyclic.
bool IsWellFormed(const DepTree& tree);
// Every token between a head and its dependent descends from that head.
bool IsProjective(const DepTree& tree);

enum class Move { kShift, kLeftArc, kRightArc };

struct Transition {
  Move move = Move::kShift;
  std::string label;  // empty for SHIFT

  static Transition Shift() { return {Move::kShift, ""}; }
  static Transition Left(std::string l) { return {Move::kLeftArc, std::move(l)}; }
  static Transition Right(std::string l) { return {Move::kRightArc, std::move(l)}; }

  // "SHIFT", "L:label", "R:label".
  std::string Name() const;
  // Throws Error(BadModel) for anything else.
  static Transition FromName(const std::string& name);

  bool operator==(const Transition&) const = default;
};

// Arc-standard configuration with node 0 already on the stack.
class ParserState {
 public:
  explicit ParserState(std::size_t n);

  std::size_t size() const { return heads_.size() - 1; }
  const std::vector<int>& stack() const { return stack_; }
  // Front of the buffer, or -1 when empty; offset 1 is the next item.
  int Buffer(std::size_t offset = 0) const;
  bool BufferEmpty() const { return next_ > size(); }
  bool Terminal() const { return BufferEmpty() && stack_.size() == 1; }
  // Stack item counted from the top, or -1.
  int Stack(std::size_t depth) const;

  // Throws Error(IllegalTransition) when the move's preconditions fail.
  void Apply(const Transition& t);
  // Stricter check used while decoding so that any sequence of allowed moves
  // ends in a single-rooted tree.
  bool Allowed(const Transition& t) const;

  int head(int token) const { return heads_[token]; }
  const std::string& label(int token) const { return labels_[token]; }
  int left_count(int token) const { return left_count_[token]; }
  int right_count(int token) const { return right_count_[token]; }
  // Outermost attached dependent on each side, or -1.
  int leftmost(int token) const { return leftmost_[token]; }
  int rightmost(int token) const { return rightmost_[token]; }

  // Heads still missing are left as -1.
  DepTree Tree() const;

 private:
  void Attach(int head, int dependent, const std::string& label);

  std::vector<int> stack_;
  std::size_t next_ = 1;
  std::vector<int> heads_;
  std::vector<std::string> labels_;
  std::vector<int> left_count_, right_count_, leftmost_, rightmost_;
};

// Static arc-standard oracle. Throws Error(NonProjective).
std::vector<Transition> Oracle(const DepTree& tree);

// Re-attaches the shortest non-projective arc (then the leftmost dependent)
// to the nearest ancestor of its head that makes it projective, until the
// tree is projective. Labels are kept.
DepTree Projectivize(DepTree tree);

struct ParseInput {
  std::vector<std::string> forms;
  std::vector<std::string> upos;
};

struct ParseExample {
  ParseInput input;
  DepTree tree;
};

FeatureVector StateFeatures(const ParserState& state, const ParseInput& input);

// Greedy decoding with the transition classifier. Throws Error(EmptyInput).
DepTree Parse(const LinearModel& model, const ParseInput& input);

// Transition inventory for a set of dependency labels: SHIFT, then L:/R: for
// each non-root label plus the fallback, then R:root.
TagSet TransitionSet(const std::vector<std::string>& labels);

// Gold trees are projectivized first. Throws Error(InvalidGold) for
// malformed trees.
LinearModel TrainParser(const std::vector<ParseExample>& examples,
                        const TrainOptions& options);

// Throws Error(InvalidGold) naming the sentence when heads are missing or
// the tree is malformed.
std::vector<ParseExample> ExamplesFromConllu(
    const std::vector<ConlluSentence>& sentences);

void AssignTree(const DepTree& tree, ConlluSentence& sentence);

}  // namespace dantools::depparse

#endif  // DANTOOLS_DEPPARSE_H_
