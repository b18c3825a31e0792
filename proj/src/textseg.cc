#include "dantools/textseg.h"

#include <algorithm>
#include <fstream>

#include "dantools/error.h"
#include "dantools/utf8.h"

namespace dantools {

namespace {

bool IsWordChar(char32_t cp) {
  return utf8::IsLetter(cp) || utf8::IsDigit(cp);
}

// Characters that may join two word characters into a single token, e.g.
// "EU-siden", "bl.a", "rock'n'roll", "24/7".
bool IsConnector(char32_t cp) {
  switch (cp) {
    case '-': case '\'': case '.': case '/': case ':': case '&': case '_':
    case '@': case '+': case 0x2019:
      return true;
    default:
      return false;
  }
}

bool IsTerminator(std::string_view form) {
  return !form.empty() && std::all_of(form.begin(), form.end(), [](char c) {
    return c == '.' || c == '!' || c == '?';
  });
}

bool HasBlankLine(std::string_view ws) {
  bool seen_newline = false;
  for (char c : ws) {
    if (c == '\n') {
      if (seen_newline) return true;
      seen_newline = true;
    }
  }
  return false;
}

std::string Trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

Abbreviations::Abbreviations(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    if (!e.empty()) entries_.insert(utf8::Lower(e));
  }
  by_length_.assign(entries_.begin(), entries_.end());
  std::stable_sort(by_length_.begin(), by_length_.end(),
                   [](const std::string& a, const std::string& b) {
                     return a.size() > b.size();
                   });
}

Abbreviations Abbreviations::Danish() {
  return Abbreviations({"bl.a.", "ca.", "fx", "dvs.", "osv."});
}

Abbreviations Abbreviations::Read(std::istream& in) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    entries.push_back(line);
  }
  return Abbreviations(entries);
}

Abbreviations Abbreviations::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read abbreviation list " + path);
  return Read(in);
}

std::size_t Abbreviations::MatchAt(std::string_view text, std::size_t pos,
                                   std::size_t limit) const {
  for (const auto& abbr : by_length_) {
    if (pos + abbr.size() > limit) continue;
    if (utf8::Lower(text.substr(pos, abbr.size())) != abbr) continue;
    const std::size_t after = pos + abbr.size();
    if (after < limit && IsWordChar(utf8::Decode(text, after).value)) continue;
    return abbr.size();
  }
  return 0;
}

bool Abbreviations::Contains(std::string_view form) const {
  return entries_.count(utf8::Lower(form)) > 0;
}

void Tokenizer::SplitChunk(std::string_view text, std::size_t begin,
                           std::size_t end,
                           std::vector<TokenSpan>& out) const {
  auto emit = [&](std::size_t s, std::size_t e) {
    TokenSpan t;
    t.form = std::string(text.substr(s, e - s));
    t.start = s;
    t.end = e;
    out.push_back(std::move(t));
  };

  std::size_t pos = begin;
  while (pos < end) {
    const utf8::CodePoint c = utf8::Decode(text, pos);
    if (!IsWordChar(c.value)) {
      // Runs of one repeated punctuation character ("...", "!!") stay whole.
      std::size_t e = pos + c.length;
      while (e < end && text.compare(e, c.length, text, pos, c.length) == 0) {
        e += c.length;
      }
      emit(pos, e);
      pos = e;
      continue;
    }

    if (const std::size_t n = abbreviations_.MatchAt(text, pos, end); n > 0) {
      emit(pos, pos + n);
      pos += n;
      continue;
    }

    std::size_t e = pos;
    bool all_digits = true;
    char32_t prev = 0;
    while (e < end) {
      const utf8::CodePoint d = utf8::Decode(text, e);
      if (IsWordChar(d.value)) {
        all_digits = all_digits && utf8::IsDigit(d.value);
        prev = d.value;
        e += d.length;
        continue;
      }
      const bool joins = IsConnector(d.value) || d.value == ',';
      if (!joins || e + d.length >= end) break;
      const char32_t next = utf8::Decode(text, e + d.length).value;
      if (!IsWordChar(next)) break;
      // A comma only joins digits: "3,5" but not "på,for".
      if (d.value == ',' && !(utf8::IsDigit(prev) && utf8::IsDigit(next))) {
        break;
      }
      all_digits = all_digits && d.value != ',' && d.value != '.';
      e += d.length;
    }

    // Ordinals: "5. maj" keeps "5." when the next word is not capitalised.
    if (all_digits && e + 1 == end && text[e] == '.') {
      std::size_t k = end;
      while (k < text.size() && IsSpace(text[k])) ++k;
      if (k > end && k < text.size()) {
        const char32_t next = utf8::Decode(text, k).value;
        if (utf8::IsLower(next) || utf8::IsDigit(next)) ++e;
      }
    }
    emit(pos, e);
    pos = e;
  }
}

std::vector<TokenSpan> Tokenizer::Segment(std::string_view text) const {
  std::vector<TokenSpan> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !IsSpace(text[end])) ++end;
    if (end > pos) SplitChunk(text, pos, end, tokens);
    pos = end;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t next =
        i + 1 < tokens.size() ? tokens[i + 1].start : text.size();
    tokens[i].trailing_whitespace =
        std::string(text.substr(tokens[i].end, next - tokens[i].end));
    tokens[i].space_after = !tokens[i].trailing_whitespace.empty();
  }
  return tokens;
}

std::vector<SentenceSpan> Tokenizer::Tokenize(std::string_view text) const {
  std::vector<TokenSpan> tokens = Segment(text);
  std::vector<SentenceSpan> sentences;
  SentenceSpan current;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bool closes = i + 1 == tokens.size() ||
                  HasBlankLine(tokens[i].trailing_whitespace);
    if (!closes && IsTerminator(tokens[i].form) && tokens[i].space_after) {
      const char32_t next = utf8::Decode(tokens[i + 1].form, 0).value;
      closes = utf8::IsUpper(next);
    }
    current.tokens.push_back(std::move(tokens[i]));
    if (closes) {
      const TokenSpan& first = current.tokens.front();
      const TokenSpan& last = current.tokens.back();
      const std::size_t stop = last.end + last.trailing_whitespace.size();
      current.text = std::string(text.substr(first.start, stop - first.start));
      sentences.push_back(std::move(current));
      current = SentenceSpan();
    }
  }
  return sentences;
}

std::vector<std::pair<std::size_t, std::size_t>> Tokenizer::SplitSentences(
    std::string_view text) const {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const SentenceSpan& s : Tokenize(text)) {
    ranges.emplace_back(s.tokens.front().start, s.tokens.back().end);
  }
  return ranges;
}

}  // namespace dantools
