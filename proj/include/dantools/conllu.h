#ifndef DANTOOLS_CONLLU_H_
#define DANTOOLS_CONLLU_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dantools/textseg.h"

namespace dantools {

// The 17 Universal Dependencies part-of-speech tags, in alphabetical order.
const std::vector<std::string>& UposTags();
bool IsUpos(std::string_view tag);

// One ten-column row. Placeholder fields hold the literal "_"; an
// unattached token has no head.
struct ConlluToken {
  int id = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::optional<int> head;
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  bool operator==(const ConlluToken&) const = default;
};

struct ConlluSentence {
  // Comment text without the leading "# ".
  std::vector<std::string> comments;
  std::vector<ConlluToken> tokens;

  bool operator==(const ConlluSentence&) const = default;
};

// Streaming, single-pass reader. Sentences are separated by blank lines.
// Throws Error (LineFieldCount, NonContiguousIds, BadHead, UnsupportedId,
// BadField) carrying the offending line number.
std::vector<ConlluSentence> ParseConllu(std::istream& in);
std::vector<ConlluSentence> ParseConllu(std::string_view text);

// Canonical output: tab-separated fields, LF endings, one blank line after
// every sentence. Throws Error(InvariantViolation) for malformed sentences.
void WriteConllu(std::ostream& out, const ConlluSentence& sentence);
std::string EmitConllu(const std::vector<ConlluSentence>& sentences);

// Throws Error(InvariantViolation) describing the first violated invariant.
void ValidateSentence(const ConlluSentence& sentence);

// Builds an unannotated sentence from tokenizer output: a "text = ..."
// comment plus FORM and spacing MISC entries for each token.
ConlluSentence FromSpans(const SentenceSpan& span);

// Spacing metadata for MISC: "SpaceAfter=No" for no whitespace, nothing for
// a single space, "SpacesAfter=<escaped>" otherwise.
std::string SpacingMisc(std::string_view trailing_whitespace);
std::string EscapeSpaces(std::string_view ws);
std::string UnescapeSpaces(std::string_view escaped);

// Value of `key` in a "|"-joined MISC column, if present.
std::optional<std::string> MiscValue(std::string_view misc,
                                     std::string_view key);

// Slashed-tag format: "form/TAG form/TAG ...", one sentence per line.
struct SlashedSentence {
  std::vector<std::pair<std::string, std::string>> pairs;

  bool operator==(const SlashedSentence&) const = default;
};

std::string EmitSlashed(const SlashedSentence& sentence);
// The tag is everything after the last '/' of each item. Throws
// Error(MissingTag) for an item without a tag.
SlashedSentence ParseSlashed(std::string_view line);

}  // namespace dantools

#endif  // DANTOOLS_CONLLU_H_
