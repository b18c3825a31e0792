#ifndef DANTOOLS_TEXTSEG_H_
#define DANTOOLS_TEXTSEG_H_

#include <cstddef>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dantools {

// One token of the input. Offsets are byte offsets into the UTF-8 input;
// form == text.substr(start, end - start).
struct TokenSpan {
  std::string form;
  std::size_t start = 0;
  std::size_t end = 0;
  bool space_after = true;
  // Whitespace between this token and the next one (or the end of input).
  std::string trailing_whitespace;
};

struct SentenceSpan {
  std::vector<TokenSpan> tokens;
  // Covers the first token through the trailing whitespace of the last.
  std::string text;
};

// Case-insensitive set of abbreviations that are kept as single tokens and
// never close a sentence.
class Abbreviations {
 public:
  Abbreviations() = default;
  explicit Abbreviations(const std::vector<std::string>& entries);

  // bl.a., ca., fx, dvs., osv.
  static Abbreviations Danish();
  // One abbreviation per line; blank lines and lines starting with '#' are
  // ignored.
  static Abbreviations Read(std::istream& in);
  static Abbreviations Load(const std::string& path);

  // Length in bytes of the longest abbreviation that matches `text` at
  // `pos` and is not followed by a letter or digit; 0 when none does.
  std::size_t MatchAt(std::string_view text, std::size_t pos,
                      std::size_t limit) const;

  bool Contains(std::string_view form) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::string> entries_;  // lowercased
  std::vector<std::string> by_length_;
};

class Tokenizer {
 public:
  Tokenizer() : Tokenizer(Abbreviations::Danish()) {}
  explicit Tokenizer(Abbreviations abbreviations)
      : abbreviations_(std::move(abbreviations)) {}

  std::vector<SentenceSpan> Tokenize(std::string_view text) const;

  // Byte ranges [start, end) of each sentence, from its first token's start
  // to its last token's end.
  std::vector<std::pair<std::size_t, std::size_t>> SplitSentences(
      std::string_view text) const;

  const Abbreviations& abbreviations() const { return abbreviations_; }

 private:
  std::vector<TokenSpan> Segment(std::string_view text) const;
  void SplitChunk(std::string_view text, std::size_t begin, std::size_t end,
                  std::vector<TokenSpan>& out) const;

  Abbreviations abbreviations_;
};

bool IsSpace(char c);

}  // namespace dantools

#endif  // DANTOOLS_TEXTSEG_H_
