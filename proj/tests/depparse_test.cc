#include "dantools/depparse.h"

#include <random>
#include <sstream>

#include "dantools/error.h"
#include "doctest.h"
#include "test_util.h"
#include "toy_corpora.h"
#include "tree_oracle.h"

namespace dantools::depparse {
namespace {

DepTree Labelled(std::vector<int> heads) {
  DepTree t;
  t.heads = std::move(heads);
  for (int h : t.heads) t.labels.push_back(h == 0 ? "root" : "dep");
  return t;
}

std::string Serialize(const LinearModel& m) {
  std::ostringstream out;
  m.Write(out);
  return out.str();
}

ParseInput RandomInput(std::mt19937& rng, std::size_t n) {
  static const std::vector<std::string> forms = {"en", "hund", "ser", "i", "Aarhus", "."};
  const auto& upos = UposTags();
  ParseInput in;
  for (std::size_t i = 0; i < n; ++i) {
    in.forms.push_back(forms[rng() % forms.size()]);
    in.upos.push_back(upos[rng() % upos.size()]);
  }
  return in;
}

TEST_CASE("apply follows arc-standard semantics") {
  ParserState one(1);
  one.Apply(Transition::Shift());
  one.Apply(Transition::Right("root"));
  CHECK(one.Terminal());
  CHECK(one.Tree() == Labelled({0}));

  ParserState s(2);
  try {
    s.Apply(Transition::Left("nsubj"));
    FAIL("expected IllegalTransition");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kIllegalTransition);
  }
  s.Apply(Transition::Shift());
  CHECK_THROWS_AS(s.Apply(Transition::Left("nsubj")), Error);  // onto node 0
  s.Apply(Transition::Shift());
  CHECK(s.stack() == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(s.Apply(Transition::Shift()), Error);
  s.Apply(Transition::Left("nsubj"));
  CHECK(s.stack() == std::vector<int>{0, 2});
  CHECK(s.head(1) == 2);
  CHECK(s.left_count(2) == 1);
  CHECK(s.leftmost(2) == 1);
  CHECK_FALSE(s.Allowed(Transition::Right("nsubj")));
  CHECK(s.Allowed(Transition::Right("root")));
}

TEST_CASE("transition names") {
  for (const Transition& t : {Transition::Shift(), Transition::Left("nmod:poss"),
                              Transition::Right("root")}) {
    CHECK(Transition::FromName(t.Name()) == t);
  }
  CHECK(Transition::Left("obj").Name() == "L:obj");
  CHECK_THROWS_AS(Transition::FromName("X:obj"), Error);
}

TEST_CASE("oracle on a chain") {
  const DepTree chain = Labelled({2, 3, 0});
  const auto moves = Oracle(chain);
  CHECK(moves == std::vector<Transition>{Transition::Shift(), Transition::Shift(),
                                         Transition::Left("dep"), Transition::Shift(),
                                         Transition::Left("dep"),
                                         Transition::Right("root")});
  CHECK(testing::Replay(moves, 3) == chain);
}

TEST_CASE("oracle replays the sample tree") {
  const auto sample =
      ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  const auto examples = ExamplesFromConllu(sample);
  REQUIRE(examples.size() == 1);
  const DepTree& gold = examples[0].tree;
  REQUIRE(gold.size() == 23);
  CHECK(IsProjective(gold));
  const DepTree replay = testing::Replay(Oracle(gold), 23);
  CHECK(replay == gold);
  CHECK(replay.heads[0] == 2);
  CHECK(replay.labels[0] == "advmod");
}

TEST_CASE("oracle replay identity on random projective trees") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const DepTree t = testing::RandomProjectiveTree(rng, n);
    REQUIRE(testing::OracleIsTree(t.heads));
    REQUIRE_FALSE(testing::HasCrossingArcs(t.heads));
    REQUIRE(IsProjective(t));
    const auto moves = Oracle(t);
    REQUIRE(moves.size() == static_cast<std::size_t>(2 * n));
    REQUIRE(testing::Replay(moves, n) == t);
  }
}

TEST_CASE("projectivity agrees with the crossing-arc detector on all small trees") {
  for (int n = 1; n <= 5; ++n) {
    for (const auto& h : testing::AllTrees(n)) {
      const DepTree t = Labelled(h);
      REQUIRE(IsWellFormed(t));
      REQUIRE(IsProjective(t) == !testing::HasCrossingArcs(h));
      if (!IsProjective(t)) {
        CHECK_THROWS_AS(Oracle(t), Error);
      }
    }
  }
  CHECK_FALSE(IsWellFormed(Labelled({0, 0})));
  CHECK_FALSE(IsWellFormed(Labelled({2, 1, 0})));
  CHECK_FALSE(IsWellFormed(Labelled({1})));
}

TEST_CASE("projectivize on every 4-token tree") {
  std::size_t non_projective = 0;
  for (const auto& h : testing::AllTrees(4)) {
    DepTree t = Labelled(h);
    t.labels[0] = h[0] == 0 ? "root" : "nsubj";
    const DepTree p = Projectivize(t);
    REQUIRE(testing::OracleIsTree(p.heads));
    REQUIRE_FALSE(testing::HasCrossingArcs(p.heads));
    REQUIRE(p.labels == t.labels);
    if (!testing::HasCrossingArcs(h)) {
      REQUIRE(p == t);
    } else {
      ++non_projective;
      REQUIRE(p != t);
      REQUIRE(testing::Replay(Oracle(p), 4) == p);
    }
  }
  CHECK(non_projective > 0);
  // Arcs 1->3 and 2->4 cross; only 4 moves, to its grandparent 1.
  const DepTree minimal = Labelled({0, 1, 1, 2});
  REQUIRE(testing::HasCrossingArcs(minimal.heads));
  CHECK(Projectivize(minimal).heads == std::vector<int>{0, 1, 1, 1});
}

TEST_CASE("projectivize property over random trees") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    std::vector<int> h;
    do {
      h.assign(n, 0);
      for (int& x : h) x = static_cast<int>(rng() % (n + 1));
    } while (!testing::OracleIsTree(h) ||
             std::any_of(h.begin(), h.end(), [&, i = 0](int x) mutable {
               return x == ++i;
             }));
    const DepTree p = Projectivize(Labelled(h));
    REQUIRE(testing::OracleIsTree(p.heads));
    REQUIRE_FALSE(testing::HasCrossingArcs(p.heads));
  }
}

TEST_CASE("random models always yield well-formed trees") {
  std::mt19937 rng(13);
  const TagSet tags = TransitionSet({"nsubj", "obj", "root", "punct"});
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    LinearModel m(tags);
    const ParseInput in = RandomInput(rng, 1 + rng() % 15);
    // Weights on the features the parser is going to see.
    for (const std::string f : {"bias", "buf=empty", "buf=some", "s0p=<root>"}) {
      for (double& x : m.MutableEmission(f)) x = w(rng);
    }
    for (const auto& p : UposTags()) {
      for (double& x : m.MutableEmission("s0p=" + p)) x = w(rng);
      for (double& x : m.MutableEmission("b0p=" + p)) x = w(rng);
    }
    const DepTree t = Parse(m, in);
    REQUIRE(t.size() == in.forms.size());
    REQUIRE(testing::OracleIsTree(t.heads));
    REQUIRE(IsWellFormed(t));
    REQUIRE_FALSE(testing::HasCrossingArcs(t.heads));
  }
  ParseInput one{{"Hej"}, {"INTJ"}};
  CHECK(Parse(LinearModel(tags), one) == Labelled({0}));
  CHECK_THROWS_AS(Parse(LinearModel(tags), ParseInput{}), Error);
}

TEST_CASE("training") {
  const auto bank = ExamplesFromConllu(testing::ToyTreebank(50, 21));
  TrainOptions zero;
  zero.epochs = 0;
  const LinearModel z = TrainParser(bank, zero);
  CHECK(z.NonZero() == 0);
  CHECK(z.tags().scheme() == Scheme::kTransition);
  CHECK(z.tags().label(0) == "SHIFT");
  CHECK(z.tags().Index("R:root") == static_cast<int>(z.tags().size()) - 1);
  CHECK(z.tags().Index("L:dep") > 0);

  TrainOptions opts;
  opts.epochs = 10;
  opts.seed = 3;
  std::vector<double> acc;
  opts.progress = [&](int, double a) { acc.push_back(a); };
  const LinearModel m = TrainParser(bank, opts);
  CHECK(acc.size() == 10);
  CHECK(Serialize(TrainParser(bank, opts)) == Serialize(m));
  CHECK(Serialize(m).find("\nP\t") != std::string::npos);

  std::size_t correct = 0, total = 0;
  for (const auto& ex : bank) {
    const DepTree t = Parse(m, ex.input);
    for (std::size_t i = 0; i < t.size(); ++i) {
      correct += t.heads[i] == ex.tree.heads[i] && t.labels[i] == ex.tree.labels[i];
      ++total;
    }
  }
  CHECK(static_cast<double>(correct) / total >= 0.95);

  std::istringstream in(Serialize(m));
  CHECK(LinearModel::Read(in) == m);
}

TEST_CASE("training data errors") {
  auto sample = ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  sample[0].tokens[3].head.reset();
  try {
    ExamplesFromConllu(sample);
    FAIL("expected InvalidGold");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidGold);
  }
  ParseExample bad{{{"a", "b"}, {"X", "X"}}, Labelled({0, 0})};
  CHECK_THROWS_AS(TrainParser({bad}, TrainOptions{}), Error);

  // Non-projective gold is accepted after projectivization.
  ParseExample crossing{{{"a", "b", "c", "d"}, {"X", "X", "X", "X"}},
                        Labelled({0, 1, 1, 2})};
  TrainOptions opts;
  opts.epochs = 2;
  CHECK_NOTHROW(TrainParser({crossing}, opts));
}

TEST_CASE("assigning a tree to a sentence") {
  auto sample = ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  const auto gold = ExamplesFromConllu(sample)[0].tree;
  for (auto& t : sample[0].tokens) {
    t.head.reset();
    t.deprel = "_";
  }
  AssignTree(gold, sample[0]);
  CHECK(EmitConllu(sample) == testing::ReadFile(testing::DataPath("sample.conllu")));
}

}  // namespace
}  // namespace dantools::depparse
