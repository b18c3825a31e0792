#include "dantools/conllu.h"

#include <random>

#include "dantools/error.h"
#include "doctest.h"
#include "test_util.h"

namespace dantools {
namespace {

Errc CodeOf(std::string_view text) {
  try {
    ParseConllu(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::kBadField;
}

int LineOf(std::string_view text) {
  try {
    ParseConllu(text);
  } catch (const Error& e) {
    return e.line();
  }
  return 0;
}

TEST_CASE("sample block parses into one sentence of 23 tokens") {
  const auto ss =
      ParseConllu(testing::ReadFile(testing::DataPath("sample.conllu")));
  REQUIRE(ss.size() == 1);
  const auto& s = ss[0];
  REQUIRE(s.tokens.size() == 23);
  REQUIRE(s.comments.size() == 1);
  CHECK(s.comments[0].rfind("text = Derfor presser EU-siden", 0) == 0);
  const ConlluToken& presser = s.tokens[1];
  CHECK(presser.form == "presser");
  CHECK(presser.lemma == "presse");
  CHECK(presser.upos == "VERB");
  CHECK(presser.head == 0);
  CHECK(presser.deprel == "root");
  CHECK(s.tokens[22].misc == "SpacesAfter=\\n");
  CHECK(UnescapeSpaces(*MiscValue(s.tokens[22].misc, "SpacesAfter")) == "\n");
}

TEST_CASE("sample block round-trips byte for byte") {
  const std::string golden =
      testing::ReadFile(testing::DataPath("sample.conllu"));
  CHECK(EmitConllu(ParseConllu(golden)) == golden);
}

TEST_CASE("empty input") { CHECK(ParseConllu("").empty()); }

TEST_CASE("single rooted token") {
  ConlluSentence s;
  s.comments = {"text = Hej"};
  ConlluToken t;
  t.id = 1;
  t.form = "Hej";
  t.head = 0;
  t.deprel = "root";
  s.tokens = {t};
  CHECK(EmitConllu({s}) == "# text = Hej\n1\tHej\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
}

TEST_CASE("parse errors name the line") {
  const std::string nine = "# c\n1\ta\t_\t_\t_\t_\t0\troot\t_\n";
  CHECK(CodeOf(nine) == Errc::kLineFieldCount);
  CHECK(LineOf(nine) == 2);
  CHECK(CodeOf("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n3\tb\t_\t_\t_\t_\t1\tx\t_\t_\n") ==
        Errc::kNonContiguousIds);
  CHECK(CodeOf("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t7\tx\t_\t_\n") ==
        Errc::kBadHead);
  CHECK(LineOf("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t7\tx\t_\t_\n") ==
        2);
  CHECK(CodeOf("1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_\n") == Errc::kUnsupportedId);
  CHECK(CodeOf("1.1\tab\t_\t_\t_\t_\t_\t_\t_\t_\n") == Errc::kUnsupportedId);
  CHECK(CodeOf("1\ta\t_\tFOO\t_\t_\t0\troot\t_\t_\n") == Errc::kBadField);
}

TEST_CASE("emit rejects invariant violations") {
  ConlluSentence s;
  ConlluToken t;
  t.id = 1;
  t.form = "a";
  t.head = 0;
  t.deprel = "nsubj";
  s.tokens = {t};
  CHECK_THROWS_AS(EmitConllu({s}), Error);
  s.tokens[0].deprel = "root";
  s.tokens[0].feats = "Number=Sing|Gender=Com";
  CHECK_THROWS_AS(EmitConllu({s}), Error);
  s.tokens[0].feats = "Gender=Com|Number=Sing";
  CHECK_NOTHROW(EmitConllu({s}));
  s.tokens[0].form = "a b\tc";
  CHECK_THROWS_AS(EmitConllu({s}), Error);
}

TEST_CASE("spacing metadata from tokenizer spans") {
  Tokenizer tok;
  const auto spans = tok.Tokenize("Hej, du.\n");
  REQUIRE(spans.size() == 1);
  const ConlluSentence s = FromSpans(spans[0]);
  CHECK(s.comments == std::vector<std::string>{"text = Hej, du."});
  REQUIRE(s.tokens.size() == 4);
  CHECK(s.tokens[0].misc == "SpaceAfter=No");
  CHECK(s.tokens[1].misc == "_");
  CHECK(s.tokens[2].misc == "SpaceAfter=No");
  CHECK(s.tokens[3].misc == "SpacesAfter=\\n");
  CHECK(SpacingMisc("  \t|") == "SpacesAfter=\\s\\s\\t\\p");
  CHECK(UnescapeSpaces(EscapeSpaces(" \t\n\r|\\x")) == " \t\n\r|\\x");
}

ConlluSentence RandomSentence(std::mt19937& rng) {
  static const std::vector<std::string> forms = {"a", "Hej", "EU-siden", ",",
                                                 "æøå", "24/7", "_"};
  static const std::vector<std::string> feats = {
      "_", "Definite=Def", "Gender=Com|Number=Sing",
      "Mood=Ind|Tense=Pres|VerbForm=Fin|Voice=Act"};
  static const std::vector<std::string> miscs = {"_", "SpaceAfter=No",
                                                 "SpacesAfter=\\n",
                                                 "Foo=Bar|SpaceAfter=No"};
  static const std::vector<std::string> rels = {"nsubj", "obj", "advmod",
                                                "acl:relcl", "punct"};
  ConlluSentence s;
  if (rng() % 2) s.comments.push_back("text = random");
  if (rng() % 3 == 0) s.comments.push_back("sent_id = " + std::to_string(rng() % 100));
  const int n = 1 + static_cast<int>(rng() % 10);
  const bool parsed = rng() % 4 != 0;
  const int root = 1 + static_cast<int>(rng() % n);
  for (int i = 1; i <= n; ++i) {
    ConlluToken t;
    t.id = i;
    t.form = forms[rng() % forms.size()];
    t.lemma = rng() % 2 ? "_" : t.form;
    t.upos = rng() % 5 ? UposTags()[rng() % UposTags().size()] : "_";
    t.feats = feats[rng() % feats.size()];
    t.misc = miscs[rng() % miscs.size()];
    if (parsed) {
      if (i == root) {
        t.head = 0;
        t.deprel = "root";
      } else {
        // Any non-self head is valid at this layer.
        int h = 1 + static_cast<int>(rng() % n);
        if (h == i) h = root;
        t.head = h;
        t.deprel = rels[rng() % rels.size()];
      }
    }
    s.tokens.push_back(t);
  }
  return s;
}

TEST_CASE("random sentences survive emit then parse") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ConlluSentence> doc = {RandomSentence(rng), RandomSentence(rng)};
    const std::string text = EmitConllu(doc);
    REQUIRE(ParseConllu(text) == doc);
    REQUIRE(EmitConllu(ParseConllu(text)) == text);
  }
}

TEST_CASE("slashed tags") {
  SlashedSentence s;
  s.pairs = {{"Danmark", "B-LOC"}, {".", "O"}};
  CHECK(EmitSlashed(s) == "Danmark/B-LOC ./O");
  CHECK(EmitSlashed(SlashedSentence{}).empty());
  CHECK(ParseSlashed("").pairs.empty());

  const SlashedSentence slash = ParseSlashed("24/7/O");
  REQUIRE(slash.pairs.size() == 1);
  CHECK(slash.pairs[0].first == "24/7");
  CHECK(slash.pairs[0].second == "O");

  const SlashedSentence example = ParseSlashed(testing::kNerExample);
  CHECK(example.pairs.size() == 26);
  CHECK(example.pairs[24] == std::pair<std::string, std::string>{"Danmark", "B-LOC"});
  CHECK(EmitSlashed(example) == testing::kNerExample);

  try {
    ParseSlashed("Danmark/B-LOC Skat");
    FAIL("expected MissingTag");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kMissingTag);
  }
}

TEST_CASE("slashed round trip on random data") {
  std::mt19937 rng(5);
  const std::vector<std::string> forms = {"a", "24/7", "/x", "Skat", "æ/ø",
                                          "."};
  const std::vector<std::string> tags = {"O", "B-PER", "I-PER", "B-LOC"};
  for (int trial = 0; trial < 200; ++trial) {
    SlashedSentence s;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      s.pairs.emplace_back(forms[rng() % forms.size()], tags[rng() % tags.size()]);
    }
    const std::string line = EmitSlashed(s);
    REQUIRE(ParseSlashed(line) == s);
    REQUIRE(EmitSlashed(ParseSlashed(line)) == line);
  }
}

}  // namespace
}  // namespace dantools
