#include "dantools/depparse.h"

#include <algorithm>
#include <limits>
#include <set>

#include "dantools/error.h"
#include "dantools/utf8.h"

namespace dantools::depparse {
namespace {

// Whether `node` lies in the subtree of `ancestor` (1-based heads vector with
// a dummy slot 0).
bool Dominates(const std::vector<int>& heads, int ancestor, int node) {
  for (std::size_t steps = 0; node > 0 && steps < heads.size(); ++steps) {
    if (node == ancestor) return true;
    node = heads[node];
  }
  return node == ancestor;
}

std::vector<int> OneBased(const DepTree& tree) {
  std::vector<int> h(tree.size() + 1, 0);
  std::copy(tree.heads.begin(), tree.heads.end(), h.begin() + 1);
  return h;
}

bool ArcProjective(const std::vector<int>& heads, int h, int d) {
  const int lo = std::min(h, d), hi = std::max(h, d);
  for (int k = lo + 1; k < hi; ++k) {
    if (!Dominates(heads, h, k)) return false;
  }
  return true;
}

}  // namespace

bool IsWellFormed(const DepTree& tree) {
  const int n = static_cast<int>(tree.size());
  if (tree.labels.size() != tree.heads.size()) return false;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int h = tree.heads[i];
    if (h < 0 || h > n || h == i + 1) return false;
    if ((h == 0) != (tree.labels[i] == kRootLabel)) return false;
    roots += h == 0;
  }
  if (roots != 1) return false;
  const std::vector<int> heads = OneBased(tree);
  for (int i = 1; i <= n; ++i) {
    int node = i;
    for (int steps = 0; node != 0; ++steps) {
      if (steps > n) return false;
      node = heads[node];
    }
  }
  return true;
}

bool IsProjective(const DepTree& tree) {
  const std::vector<int> heads = OneBased(tree);
  for (int d = 1; d < static_cast<int>(heads.size()); ++d) {
    if (!ArcProjective(heads, heads[d], d)) return false;
  }
  return true;
}

std::string Transition::Name() const {
  switch (move) {
    case Move::kShift: return "SHIFT";
    case Move::kLeftArc: return "L:" + label;
    case Move::kRightArc: return "R:" + label;
  }
  return "";
}

Transition Transition::FromName(const std::string& name) {
  if (name == "SHIFT") return Shift();
  if (name.size() > 2 && name[1] == ':') {
    if (name[0] == 'L') return Left(name.substr(2));
    if (name[0] == 'R') return Right(name.substr(2));
  }
  throw Error(Errc::kBadModel, "unknown transition " + name);
}

ParserState::ParserState(std::size_t n)
    : stack_{0},
      heads_(n + 1, -1),
      labels_(n + 1),
      left_count_(n + 1, 0),
      right_count_(n + 1, 0),
      leftmost_(n + 1, -1),
      rightmost_(n + 1, -1) {}

int ParserState::Buffer(std::size_t offset) const {
  const std::size_t i = next_ + offset;
  return i <= size() ? static_cast<int>(i) : -1;
}

int ParserState::Stack(std::size_t depth) const {
  if (depth >= stack_.size()) return -1;
  return stack_[stack_.size() - 1 - depth];
}

void ParserState::Attach(int head, int dependent, const std::string& label) {
  heads_[dependent] = head;
  labels_[dependent] = label;
  if (dependent < head) {
    ++left_count_[head];
    if (leftmost_[head] < 0 || dependent < leftmost_[head]) leftmost_[head] = dependent;
  } else {
    ++right_count_[head];
    if (rightmost_[head] < 0 || dependent > rightmost_[head]) rightmost_[head] = dependent;
  }
}

void ParserState::Apply(const Transition& t) {
  switch (t.move) {
    case Move::kShift:
      if (BufferEmpty()) {
        throw Error(Errc::kIllegalTransition, "SHIFT with an empty buffer");
      }
      stack_.push_back(static_cast<int>(next_++));
      return;
    case Move::kLeftArc: {
      if (stack_.size() < 2) {
        throw Error(Errc::kIllegalTransition, "LEFT-ARC needs two stack items");
      }
      const int s0 = stack_.back(), s1 = stack_[stack_.size() - 2];
      if (s1 == 0) {
        throw Error(Errc::kIllegalTransition, "LEFT-ARC onto the root node");
      }
      Attach(s0, s1, t.label);
      stack_.erase(stack_.end() - 2);
      return;
    }
    case Move::kRightArc: {
      if (stack_.size() < 2) {
        throw Error(Errc::kIllegalTransition, "RIGHT-ARC needs two stack items");
      }
      const int s0 = stack_.back(), s1 = stack_[stack_.size() - 2];
      Attach(s1, s0, t.label);
      stack_.pop_back();
      return;
    }
  }
}

bool ParserState::Allowed(const Transition& t) const {
  if (t.move == Move::kShift) return !BufferEmpty();
  if (stack_.size() < 2) return false;
  const bool root_arc = stack_[stack_.size() - 2] == 0;
  if (t.move == Move::kLeftArc) return !root_arc && t.label != kRootLabel;
  if (root_arc) return BufferEmpty() && t.label == kRootLabel;
  return t.label != kRootLabel;
}

DepTree ParserState::Tree() const {
  DepTree tree;
  tree.heads.assign(heads_.begin() + 1, heads_.end());
  tree.labels.assign(labels_.begin() + 1, labels_.end());
  return tree;
}

std::vector<Transition> Oracle(const DepTree& tree) {
  if (!IsProjective(tree)) {
    throw Error(Errc::kNonProjective, "tree is not projective");
  }
  const std::size_t n = tree.size();
  const std::vector<int> heads = OneBased(tree);
  std::vector<int> pending(n + 1, 0);  // unattached gold dependents
  for (std::size_t d = 1; d <= n; ++d) ++pending[heads[d]];

  ParserState state(n);
  std::vector<Transition> out;
  while (!state.Terminal()) {
    const int s0 = state.Stack(0), s1 = state.Stack(1);
    Transition t;
    if (s1 > 0 && heads[s1] == s0) {
      t = Transition::Left(tree.labels[s1 - 1]);
    } else if (s1 >= 0 && s0 > 0 && heads[s0] == s1 && pending[s0] == 0) {
      t = Transition::Right(tree.labels[s0 - 1]);
    } else if (!state.BufferEmpty()) {
      t = Transition::Shift();
    } else {
      throw Error(Errc::kNonProjective, "oracle is stuck");
    }
    if (t.move == Move::kLeftArc) --pending[s0];
    if (t.move == Move::kRightArc) --pending[s1];
    state.Apply(t);
    out.push_back(std::move(t));
  }
  return out;
}

DepTree Projectivize(DepTree tree) {
  const int n = static_cast<int>(tree.size());
  int root = 0;
  for (int i = 0; i < n; ++i) {
    if (tree.heads[i] == 0) root = i + 1;
  }
  while (true) {
    const std::vector<int> heads = OneBased(tree);
    int pick = -1, pick_len = std::numeric_limits<int>::max();
    for (int d = 1; d <= n; ++d) {
      const int len = std::abs(heads[d] - d);
      if (len < pick_len && !ArcProjective(heads, heads[d], d)) {
        pick = d;
        pick_len = len;
      }
    }
    if (pick < 0) return tree;
    // The root token dominates every token, so the walk stops there at the
    // latest.
    int a = heads[heads[pick]];
    while (a != root && !ArcProjective(heads, a, pick)) a = heads[a];
    tree.heads[pick - 1] = a;
  }
}

FeatureVector StateFeatures(const ParserState& state, const ParseInput& input) {
  auto word = [&](int t) -> std::string {
    if (t < 0) return "<none>";
    if (t == 0) return "<root>";
    return utf8::Lower(input.forms[t - 1]);
  };
  auto tag = [&](int t) -> std::string {
    if (t < 0) return "<none>";
    if (t == 0) return "<root>";
    return input.upos[t - 1];
  };
  auto dep_label = [&](int t) -> std::string {
    return t < 0 ? "<none>" : state.label(t);
  };
  const int s0 = state.Stack(0), s1 = state.Stack(1), s2 = state.Stack(2);
  const int b0 = state.Buffer(0), b1 = state.Buffer(1);
  const std::string s0w = word(s0), s1w = word(s1), b0w = word(b0), b1w = word(b1);
  const std::string s0p = tag(s0), s1p = tag(s1), s2p = tag(s2), b0p = tag(b0),
                    b1p = tag(b1);

  FeatureVector f;
  f.reserve(40);
  f.push_back("bias");
  f.push_back("s0w=" + s0w);
  f.push_back("s0p=" + s0p);
  f.push_back("s0wp=" + s0w + "_" + s0p);
  f.push_back("s1w=" + s1w);
  f.push_back("s1p=" + s1p);
  f.push_back("s1wp=" + s1w + "_" + s1p);
  f.push_back("b0w=" + b0w);
  f.push_back("b0p=" + b0p);
  f.push_back("b0wp=" + b0w + "_" + b0p);
  f.push_back("b1w=" + b1w);
  f.push_back("b1p=" + b1p);
  f.push_back("s1p_s0p=" + s1p + "_" + s0p);
  f.push_back("s1w_s0w=" + s1w + "_" + s0w);
  f.push_back("s1w_s0p=" + s1w + "_" + s0p);
  f.push_back("s1p_s0w=" + s1p + "_" + s0w);
  f.push_back("s0p_b0p=" + s0p + "_" + b0p);
  f.push_back("s0w_b0w=" + s0w + "_" + b0w);
  f.push_back("b0p_b1p=" + b0p + "_" + b1p);
  f.push_back("s1p_s0p_b0p=" + s1p + "_" + s0p + "_" + b0p);
  f.push_back("s2p_s1p_s0p=" + s2p + "_" + s1p + "_" + s0p);
  f.push_back("s0p_b0p_b1p=" + s0p + "_" + b0p + "_" + b1p);
  f.push_back("buf=" + std::string(state.BufferEmpty() ? "empty" : "some"));
  if (s0 > 0 && s1 >= 0) {
    const int dist = std::min(s0 - s1, 5);
    f.push_back("dist=" + std::to_string(dist));
    f.push_back("s1p_s0p_dist=" + s1p + "_" + s0p + "_" + std::to_string(dist));
  }
  for (const auto& [name, t] : {std::pair{"s0", s0}, std::pair{"s1", s1}}) {
    if (t <= 0) continue;
    const std::string n = name;
    const std::string p = tag(t);
    f.push_back(n + "vl=" + std::to_string(state.left_count(t)));
    f.push_back(n + "vr=" + std::to_string(state.right_count(t)));
    f.push_back(n + "pvl=" + p + "_" + std::to_string(state.left_count(t)));
    f.push_back(n + "pvr=" + p + "_" + std::to_string(state.right_count(t)));
    f.push_back(n + "ll=" + dep_label(state.leftmost(t)));
    f.push_back(n + "rl=" + dep_label(state.rightmost(t)));
    f.push_back(n + "p_ll=" + p + "_" + dep_label(state.leftmost(t)));
    f.push_back(n + "p_rl=" + p + "_" + dep_label(state.rightmost(t)));
  }
  return f;
}

namespace {

std::vector<Transition> Moves(const TagSet& tags) {
  std::vector<Transition> moves;
  moves.reserve(tags.size());
  for (const std::string& l : tags.labels()) moves.push_back(Transition::FromName(l));
  return moves;
}

// Highest-scoring allowed move; ties go to the earlier label.
int Best(const std::vector<double>& scores, const std::vector<Transition>& moves,
         const ParserState& state) {
  int best = -1;
  for (std::size_t k = 0; k < moves.size(); ++k) {
    if (!state.Allowed(moves[k])) continue;
    if (best < 0 || scores[k] > scores[best]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

DepTree Parse(const LinearModel& model, const ParseInput& input) {
  const std::size_t n = input.forms.size();
  if (n == 0) throw Error(Errc::kEmptyInput, "empty sentence");
  if (input.upos.size() != n) {
    throw Error(Errc::kEmptyInput, "form and UPOS counts differ");
  }
  const std::vector<Transition> moves = Moves(model.tags());
  ParserState state(n);
  std::size_t steps = 0;
  while (!state.Terminal()) {
    const int k = Best(model.Scores(StateFeatures(state, input)), moves, state);
    if (k < 0) {
      // Only reachable with a transition set lacking the needed move.
      throw Error(Errc::kBadModel, "no legal transition in the model");
    }
    state.Apply(moves[k]);
    if (++steps > 2 * n) {
      throw Error(Errc::kIllegalTransition, "parser exceeded 2n transitions");
    }
  }
  return state.Tree();
}

TagSet TransitionSet(const std::vector<std::string>& labels) {
  std::set<std::string> rels(labels.begin(), labels.end());
  rels.erase(kRootLabel);
  rels.insert(kFallbackLabel);
  std::vector<std::string> names = {"SHIFT"};
  for (const std::string& r : rels) {
    names.push_back(Transition::Left(r).Name());
    names.push_back(Transition::Right(r).Name());
  }
  names.push_back(Transition::Right(kRootLabel).Name());
  return TagSet(Scheme::kTransition, names);
}

LinearModel TrainParser(const std::vector<ParseExample>& examples,
                        const TrainOptions& options) {
  std::vector<std::string> labels;
  std::vector<std::vector<Transition>> gold(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const ParseExample& ex = examples[e];
    if (!IsWellFormed(ex.tree) || ex.tree.size() != ex.input.forms.size() ||
        ex.input.upos.size() != ex.input.forms.size()) {
      throw Error(Errc::kInvalidGold,
                  "sentence " + std::to_string(e + 1) + ": malformed tree");
    }
    labels.insert(labels.end(), ex.tree.labels.begin(), ex.tree.labels.end());
    gold[e] = Oracle(Projectivize(ex.tree));
  }
  const TagSet tags = TransitionSet(labels);
  const std::vector<Transition> moves = Moves(tags);

  AveragedPerceptron perceptron(tags);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::size_t correct = 0, total = 0;
    for (std::size_t e : ShuffledOrder(examples.size(), options.seed, epoch)) {
      const ParseInput& input = examples[e].input;
      ParserState state(input.forms.size());
      for (const Transition& g : gold[e]) {
        const FeatureVector f = StateFeatures(state, input);
        const int pred = Best(perceptron.current().Scores(f), moves, state);
        const int want = tags.Index(g.Name());
        ++total;
        if (pred == want) {
          ++correct;
        } else {
          for (const std::string& x : f) {
            perceptron.UpdateEmission(x, want, 1.0);
            perceptron.UpdateEmission(x, pred, -1.0);
          }
        }
        perceptron.Tick();
        state.Apply(g);
      }
    }
    if (options.progress) {
      options.progress(epoch + 1,
                       total ? static_cast<double>(correct) / total : 1.0);
    }
  }
  return perceptron.Averaged();
}

std::vector<ParseExample> ExamplesFromConllu(
    const std::vector<ConlluSentence>& sentences) {
  std::vector<ParseExample> out;
  out.reserve(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    ParseExample ex;
    for (const ConlluToken& t : sentences[s].tokens) {
      if (!t.head) {
        throw Error(Errc::kInvalidGold, "sentence " + std::to_string(s + 1) +
                                            ": token " + std::to_string(t.id) +
                                            " has no head");
      }
      ex.input.forms.push_back(t.form);
      ex.input.upos.push_back(t.upos);
      ex.tree.heads.push_back(*t.head);
      ex.tree.labels.push_back(t.deprel);
    }
    if (!IsWellFormed(ex.tree)) {
      throw Error(Errc::kInvalidGold, "sentence " + std::to_string(s + 1) +
                                          ": malformed dependency tree");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void AssignTree(const DepTree& tree, ConlluSentence& sentence) {
  for (std::size_t i = 0; i < sentence.tokens.size() && i < tree.size(); ++i) {
    sentence.tokens[i].head = tree.heads[i];
    sentence.tokens[i].deprel = tree.labels[i];
  }
}

}  // namespace dantools::depparse
