#include "dantools/seqtag.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "dantools/error.h"
#include "doctest.h"
#include "test_util.h"
#include "toy_corpora.h"
#include "viterbi_oracle.h"

namespace dantools {
namespace {

bool Has(const FeatureVector& f, const std::string& s) {
  return std::find(f.begin(), f.end(), s) != f.end();
}

std::string Serialize(const LinearModel& m) {
  std::ostringstream out;
  m.Write(out);
  return out.str();
}

TEST_CASE("tag sets") {
  const TagSet ner = TagSet::Ner();
  CHECK(ner.labels() == std::vector<std::string>{"O", "B-PER", "I-PER", "B-LOC",
                                                 "I-LOC", "B-ORG", "I-ORG"});
  CHECK(ner.scheme() == Scheme::kBio);
  CHECK(TagSet::Upos().size() == 17);
  CHECK(TagSet::Upos().scheme() == Scheme::kPlain);
  const int o = ner.Index("O"), bl = ner.Index("B-LOC"), il = ner.Index("I-LOC"),
            ip = ner.Index("I-PER");
  CHECK_FALSE(ner.Allowed(-1, il));
  CHECK_FALSE(ner.Allowed(o, il));
  CHECK_FALSE(ner.Allowed(bl, ip));
  CHECK(ner.Allowed(bl, il));
  CHECK(ner.Allowed(il, il));
  CHECK(ner.Allowed(il, o));
  CHECK(IsBioValid(std::vector<std::string>{"B-LOC", "I-LOC", "O", "B-PER"}));
  CHECK_FALSE(IsBioValid(std::vector<std::string>{"O", "I-LOC"}));
  CHECK_FALSE(IsBioValid(std::vector<std::string>{"B-PER", "I-LOC"}));
}

TEST_CASE("word shapes") {
  CHECK(WordShape("Danmark") == std::pair<std::string, std::string>{"Xxxxxxx", "Xx"});
  CHECK(WordShape("EU-siden") == std::pair<std::string, std::string>{"XX-xxxxx", "X-x"});
  CHECK(WordShape("B42") == std::pair<std::string, std::string>{"Xdd", "Xd"});
  CHECK(WordShape("Ørsted") == std::pair<std::string, std::string>{"Xxxxxx", "Xx"});
}

TEST_CASE("feature templates") {
  const std::vector<std::string> s = {"i", "Danmark", "."};
  const FeatureVector f = ExtractFeatures(s, 1, nullptr);
  CHECK(Has(f, "w0=danmark"));
  CHECK(Has(f, "shape0=Xx"));
  CHECK(Has(f, "fshape0=Xxxxxxx"));
  CHECK(Has(f, "suf3=ark"));
  CHECK(Has(f, "pre4=Danm"));
  CHECK(Has(f, "w-1w0w+1=i_danmark_."));
  CHECK(Has(f, "w-2w-1w0w+1w+2=<s>_i_danmark_._</s>"));
  CHECK(Has(f, "w-2=<s>"));
  CHECK(Has(f, "w+2=</s>"));

  const std::vector<std::string> one = {"Hej"};
  const FeatureVector g = ExtractFeatures(one, 0, nullptr);
  CHECK(Has(g, "w-1=<s>"));
  CHECK(Has(g, "w+1=</s>"));
  CHECK(Has(g, "shape-1=<s>"));
  CHECK(Has(g, "shape+1=</s>"));
  CHECK(Has(g, "w0w+1=hej_</s>"));

  try {
    ExtractFeatures(one, 1, nullptr);
    FAIL("expected PositionOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kPositionOutOfRange);
  }
}

TEST_CASE("cluster prefix features") {
  const brown::PathTable table({{"danmark", "0010110011", 5}, {"i", "01", 9}});
  const std::vector<std::string> s = {"i", "Danmark", "."};
  const FeatureVector f = ExtractFeatures(s, 1, &table);
  CHECK(Has(f, "bc4_0=0010"));
  CHECK(Has(f, "bc6_0=001011"));
  CHECK(Has(f, "bc10_0=0010110011"));
  CHECK(Has(f, "bc20_0=0010110011"));
  CHECK(Has(f, "bc4_-1=01"));
  CHECK_FALSE(std::any_of(f.begin(), f.end(), [](const std::string& x) {
    return x.rfind("bc4_+1=", 0) == 0;
  }));

  // Same check against a path produced by an actual clustering run.
  const brown::BigramStats stats = brown::CountBigrams(
      {{"i", "danmark", "."}, {"i", "aarhus", "."}, {"fra", "danmark", "!"},
       {"til", "aarhus", "."}, {"i", "sverige", "!"}},
      1);
  const brown::PathTable learned =
      brown::Cut(brown::RunClustering(stats, 3), static_cast<int>(stats.vocab.size()));
  const std::string path = *learned.Find("danmark");
  REQUIRE(!path.empty());
  const FeatureVector h = ExtractFeatures(s, 1, &learned);
  CHECK(Has(h, "bc4_0=" + path.substr(0, 4)));
  CHECK(Has(h, "bc10_0=" + path.substr(0, 10)));
}

TEST_CASE("features depend only on the +-2 window") {
  std::mt19937 rng(2);
  const std::vector<std::string> vocab = {"a", "B", "c3", "Dd", ".", "æ"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> s(3 + rng() % 8);
    for (auto& w : s) w = vocab[rng() % vocab.size()];
    const std::size_t i = rng() % s.size();
    const FeatureVector base = ExtractFeatures(s, i, nullptr);
    auto t = s;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k + 2 < i || k > i + 2) t[k] = "zz" + std::to_string(rng() % 9);
    }
    REQUIRE(ExtractFeatures(t, i, nullptr) == base);
    REQUIRE(ExtractFeatures(s, i, nullptr) == base);
  }
}

TEST_CASE("viterbi on a zero model picks the first label everywhere") {
  LinearModel zero(TagSet::Ner());
  std::vector<FeatureVector> f(4, FeatureVector{"bias"});
  CHECK(Viterbi(zero, f) == std::vector<int>{0, 0, 0, 0});
  try {
    Viterbi(zero, {});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyInput);
  }
}

TEST_CASE("viterbi equals exhaustive search on random problems") {
  std::mt19937 rng(17);
  const std::vector<TagSet> sets = {
      TagSet(Scheme::kPlain, {"A", "B"}), TagSet(Scheme::kPlain, {"A", "B", "C", "D", "E"}),
      TagSet::Bio({"LOC"}), TagSet::Bio({"PER", "LOC"})};
  for (int trial = 0; trial < 300; ++trial) {
    const TagSet& tags = sets[trial % sets.size()];
    const int length = 1 + static_cast<int>(rng() % 6);
    const auto p = testing::MakeDecodeProblem(rng, tags, length, trial % 2 == 0);
    const std::vector<int> y = Viterbi(p.model, p.features);
    REQUIRE(y.size() == static_cast<std::size_t>(length));
    REQUIRE(testing::OracleScore(p, y) == doctest::Approx(testing::ExhaustiveBest(p)));
    REQUIRE(SequenceScore(p.model, p.features, y) ==
            doctest::Approx(testing::OracleScore(p, y)));
  }
}

TEST_CASE("decoded BIO sequences are always valid") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = testing::MakeDecodeProblem(rng, TagSet::Ner(),
                                              1 + static_cast<int>(rng() % 12), false);
    std::vector<std::string> labels;
    for (int y : Viterbi(p.model, p.features)) labels.push_back(p.model.tags().label(y));
    REQUIRE(IsBioValid(labels));
  }
}

TEST_CASE("a heavy emission weight forces B-LOC") {
  LinearModel m(TagSet::Ner());
  m.MutableEmission("w0=danmark")[m.tags().Index("B-LOC")] = 100.0;
  m.MutableEmission("w-1=danmark")[m.tags().Index("I-LOC")] = 50.0;
  const std::vector<std::string> s = {"i", "Danmark", "."};
  CHECK(Tag(m, nullptr, s) == std::vector<std::string>{"O", "B-LOC", "I-LOC"});
  // I-LOC without a preceding B-LOC never appears, even when favoured.
  LinearModel n(TagSet::Ner());
  n.MutableEmission("bias")[n.tags().Index("I-LOC")] = 10.0;
  n.MutableTransition(n.tags().Index("O"), n.tags().Index("O")) = 100.0;
  const auto labels = Tag(n, nullptr, s);
  CHECK(IsBioValid(labels));
  CHECK(labels.front() != "I-LOC");
}

TEST_CASE("training: zero epochs, determinism, invalid gold") {
  const auto examples = testing::SlashedExamples(testing::ToyNerCorpus(30, 1));
  TrainOptions zero;
  zero.epochs = 0;
  const LinearModel z = TrainTagger(examples, TagSet::Ner(), nullptr, zero);
  CHECK(z.NonZero() == 0);
  CHECK(Serialize(z) == "dantools-model\t1\tBIO\tO B-PER I-PER B-LOC I-LOC B-ORG I-ORG\n");

  TrainOptions opts;
  opts.epochs = 3;
  opts.seed = 42;
  const std::string a = Serialize(TrainTagger(examples, TagSet::Ner(), nullptr, opts));
  const std::string b = Serialize(TrainTagger(examples, TagSet::Ner(), nullptr, opts));
  CHECK(a == b);
  opts.seed = 43;
  CHECK(Serialize(TrainTagger(examples, TagSet::Ner(), nullptr, opts)) != a);

  std::vector<TaggedSentence> bad = {{{"i", "Danmark"}, {"O", "I-LOC"}}};
  try {
    TrainTagger(bad, TagSet::Ner(), nullptr, opts);
    FAIL("expected InvalidGold");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidGold);
  }
  bad = {{{"i"}, {"B-MISC"}}};
  CHECK_THROWS_AS(TrainTagger(bad, TagSet::Ner(), nullptr, opts), Error);
}

TEST_CASE("a separable 50-sentence corpus is fit almost perfectly") {
  const auto examples = testing::UposExamples(testing::ToyTreebank(50, 5));
  TrainOptions opts;
  opts.epochs = 20;
  std::vector<double> accuracy;
  opts.progress = [&](int, double acc) { accuracy.push_back(acc); };
  const LinearModel m = TrainTagger(examples, TagSet::Upos(), nullptr, opts);
  CHECK(accuracy.size() == 20);
  std::size_t correct = 0, total = 0;
  for (const auto& ex : examples) {
    const auto pred = Tag(m, nullptr, ex.forms);
    REQUIRE(pred.size() == ex.forms.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      correct += pred[i] == ex.labels[i];
      ++total;
    }
  }
  CHECK(static_cast<double>(correct) / total >= 0.99);
}

TEST_CASE("tagging the published examples after fitting them") {
  const auto ner = testing::SlashedExamples(testing::ToyNerCorpus(60, 3));
  TrainOptions opts;
  opts.epochs = 15;
  const LinearModel m = TrainTagger(ner, TagSet::Ner(), nullptr, opts);
  CHECK(Tag(m, nullptr, ner[0].forms) == ner[0].labels);

  const auto sample =
      ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  const auto pos = testing::UposExamples(sample);
  const LinearModel p = TrainTagger(pos, TagSet::Upos(), nullptr, opts);
  const auto tags = Tag(p, nullptr, pos[0].forms);
  CHECK(tags[1] == "VERB");
  CHECK(tags == pos[0].labels);

  const std::vector<std::string> one = {"Hej"};
  CHECK(Tag(p, nullptr, one).size() == 1);
  CHECK_THROWS_AS(Tag(p, nullptr, std::vector<std::string>{}), Error);
}

TEST_CASE("model files round trip") {
  const auto examples = testing::UposExamples(testing::ToyTreebank(20, 9));
  TrainOptions opts;
  opts.epochs = 2;
  const LinearModel m = TrainTagger(examples, TagSet::Upos(), nullptr, opts);
  const std::string text = Serialize(m);
  std::istringstream in(text);
  const LinearModel back = LinearModel::Read(in);
  CHECK(back == m);
  CHECK(Serialize(back) == text);

  for (const std::string bad :
       {"", "nonsense\n", "dantools-model\t2\tBIO\tO\n",
        "dantools-model\t1\tBIO\tO B-LOC\nE\tf\tB-PER\t1\n",
        "dantools-model\t1\tBIO\tO B-LOC\nE\tf\tO\tabc\n",
        "dantools-model\t1\tBIO\tO B-LOC\nX\tf\tO\t1\n"}) {
    std::istringstream bin(bad);
    try {
      LinearModel::Read(bin);
      FAIL("expected BadModel");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kBadModel);
    }
  }
}

TEST_CASE("morphological lexicon") {
  const auto sample =
      ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  const MorphLexicon lex = MorphLexicon::Build(sample);
  CHECK(lex.Lookup("presser", "VERB") ==
        MorphLexicon::Analysis{"presse", "Mood=Ind|Tense=Pres|VerbForm=Fin|Voice=Act"});
  CHECK(lex.Lookup("amerikanerne", "NOUN") ==
        MorphLexicon::Analysis{"amerikaner", "Definite=Def|Gender=Com|Number=Plur"});
  CHECK(lex.Lookup("Derfor", "ADV") == MorphLexicon::Analysis{"derfor", "_"});
  CHECK(lex.Lookup("xyzzy", "NOUN") == MorphLexicon::Analysis{"xyzzy", "_"});
  CHECK(lex.Lookup("XYZZY", "NOUN") == MorphLexicon::Analysis{"xyzzy", "_"});
  // Case-folded and UPOS-less fallbacks.
  CHECK(lex.Lookup("DERFOR", "ADV") == MorphLexicon::Analysis{"derfor", "_"});
  CHECK(lex.Lookup("Presser", "VERB").lemma == "presse");
  CHECK(lex.Lookup("presser", "NOUN") == MorphLexicon::Analysis{"presse", "_"});

  MorphLexicon counts;
  counts.Add("huse", "NOUN", "hus", "Number=Plur", 3);
  counts.Add("huse", "NOUN", "huse", "_", 1);
  CHECK(counts.Lookup("huse", "NOUN").lemma == "hus");

  std::ostringstream out;
  lex.Write(out);
  std::istringstream in(out.str());
  CHECK(MorphLexicon::Read(in) == lex);
  std::istringstream bad("a\tNOUN\ta\n");
  CHECK_THROWS_AS(MorphLexicon::Read(bad), Error);
}

}  // namespace
}  // namespace dantools
