#include "dantools/conllu.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "dantools/error.h"

namespace dantools {

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = s.find(sep, start);
    if (k == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, k - start));
    start = k + 1;
  }
}

std::optional<int> ParseInt(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool FeatsSorted(std::string_view feats) {
  if (feats == "_") return true;
  std::string_view prev;
  for (std::string_view pair : Split(feats, '|')) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == pair.size()) {
      return false;
    }
    const std::string_view key = pair.substr(0, eq);
    if (!prev.empty() && key < prev) return false;
    prev = key;
  }
  return true;
}

void Violation(const ConlluToken& t, const std::string& what) {
  throw Error(Errc::kInvariantViolation,
              "token " + std::to_string(t.id) + ": " + what);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::vector<ConlluSentence> Run() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        Flush();
      } else if (line[0] == '#') {
        if (!current_.tokens.empty()) {
          throw Error(Errc::kBadField, "comment inside a sentence", line_no_);
        }
        std::string_view c(line);
        c.remove_prefix(1);
        if (!c.empty() && c[0] == ' ') c.remove_prefix(1);
        current_.comments.emplace_back(c);
      } else {
        AddToken(line);
      }
    }
    Flush();
    return std::move(sentences_);
  }

 private:
  void AddToken(std::string_view line) {
    const std::vector<std::string_view> f = Split(line, '\t');
    if (f.size() != 10) {
      throw Error(Errc::kLineFieldCount,
                  "expected 10 tab-separated fields, found " +
                      std::to_string(f.size()),
                  line_no_);
    }
    for (std::string_view field : f) {
      if (field.empty()) {
        throw Error(Errc::kBadField, "empty field (use \"_\")", line_no_);
      }
    }
    if (f[0].find('-') != std::string_view::npos ||
        f[0].find('.') != std::string_view::npos) {
      throw Error(Errc::kUnsupportedId,
                  "multiword and empty-node ids are not supported: " +
                      std::string(f[0]),
                  line_no_);
    }
    ConlluToken t;
    const std::optional<int> id = ParseInt(f[0]);
    if (!id || *id < 1) {
      throw Error(Errc::kBadField, "bad id " + std::string(f[0]), line_no_);
    }
    if (*id != static_cast<int>(current_.tokens.size()) + 1) {
      throw Error(Errc::kNonContiguousIds,
                  "expected id " + std::to_string(current_.tokens.size() + 1) +
                      ", found " + std::string(f[0]),
                  line_no_);
    }
    t.id = *id;
    t.form = f[1];
    t.lemma = f[2];
    t.upos = f[3];
    if (t.upos != "_" && !IsUpos(t.upos)) {
      throw Error(Errc::kBadField, "unknown UPOS tag " + t.upos, line_no_);
    }
    t.xpos = f[4];
    t.feats = f[5];
    if (f[6] != "_") {
      const std::optional<int> head = ParseInt(f[6]);
      if (!head || *head < 0 || *head == t.id) {
        throw Error(Errc::kBadHead, "bad head " + std::string(f[6]), line_no_);
      }
      t.head = head;
    }
    t.deprel = f[7];
    t.deps = f[8];
    t.misc = f[9];
    current_.tokens.push_back(std::move(t));
    token_lines_.push_back(line_no_);
  }

  void Flush() {
    if (current_.tokens.empty()) {
      // Comments without tokens are not a sentence.
      current_.comments.clear();
      return;
    }
    const int n = static_cast<int>(current_.tokens.size());
    for (std::size_t i = 0; i < current_.tokens.size(); ++i) {
      const auto& head = current_.tokens[i].head;
      if (head && *head > n) {
        throw Error(Errc::kBadHead,
                    "head " + std::to_string(*head) + " outside 0.." +
                        std::to_string(n),
                    token_lines_[i]);
      }
    }
    sentences_.push_back(std::move(current_));
    current_ = ConlluSentence();
    token_lines_.clear();
  }

  std::istream& in_;
  int line_no_ = 0;
  ConlluSentence current_;
  std::vector<int> token_lines_;
  std::vector<ConlluSentence> sentences_;
};

}  // namespace

const std::vector<std::string>& UposTags() {
  static const std::vector<std::string> kTags = {
      "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET",
      "INTJ", "NOUN", "NUM",   "PART",  "PRON",  "PROPN",
      "PUNCT", "SCONJ", "SYM", "VERB",  "X"};
  return kTags;
}

bool IsUpos(std::string_view tag) {
  const auto& tags = UposTags();
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::vector<ConlluSentence> ParseConllu(std::istream& in) {
  return Reader(in).Run();
}

std::vector<ConlluSentence> ParseConllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ParseConllu(in);
}

void ValidateSentence(const ConlluSentence& s) {
  if (s.tokens.empty()) {
    throw Error(Errc::kInvariantViolation, "sentence has no tokens");
  }
  for (const std::string& c : s.comments) {
    if (c.find('\n') != std::string::npos) {
      throw Error(Errc::kInvariantViolation, "comment contains a newline");
    }
  }
  const int n = static_cast<int>(s.tokens.size());
  int roots = 0;
  bool parsed = true;
  for (int i = 0; i < n; ++i) {
    const ConlluToken& t = s.tokens[i];
    if (t.id != i + 1) Violation(t, "ids must be 1..n");
    for (const std::string* field :
         {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats, &t.deprel, &t.deps,
          &t.misc}) {
      if (field->empty()) Violation(t, "empty field");
      if (field->find_first_of("\t\n") != std::string::npos) {
        Violation(t, "field contains a tab or newline");
      }
    }
    if (t.upos != "_" && !IsUpos(t.upos)) Violation(t, "unknown UPOS tag");
    if (!FeatsSorted(t.feats)) Violation(t, "FEATS not sorted Key=Value");
    if (!t.head) {
      parsed = false;
      continue;
    }
    if (*t.head < 0 || *t.head > n || *t.head == t.id) {
      Violation(t, "head outside 0..n or self-attached");
    }
    if (*t.head == 0) {
      ++roots;
      if (t.deprel != "root") Violation(t, "root token must have deprel root");
    }
  }
  if (parsed && roots != 1) {
    throw Error(Errc::kInvariantViolation,
                "parsed sentence must have exactly one root, found " +
                    std::to_string(roots));
  }
}

void WriteConllu(std::ostream& out, const ConlluSentence& s) {
  ValidateSentence(s);
  for (const std::string& c : s.comments) out << "# " << c << '\n';
  for (const ConlluToken& t : s.tokens) {
    out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t'
        << t.xpos << '\t' << t.feats << '\t';
    if (t.head) {
      out << *t.head;
    } else {
      out << '_';
    }
    out << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc << '\n';
  }
  out << '\n';
}

std::string EmitConllu(const std::vector<ConlluSentence>& sentences) {
  std::ostringstream out;
  for (const ConlluSentence& s : sentences) WriteConllu(out, s);
  return out.str();
}

std::string EscapeSpaces(std::string_view ws) {
  std::string out;
  for (char c : ws) {
    switch (c) {
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '|': out += "\\p"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string UnescapeSpaces(std::string_view escaped) {
  std::string out;
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\' || i + 1 == escaped.size()) {
      out += escaped[i];
      continue;
    }
    switch (escaped[++i]) {
      case 's': out += ' '; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'p': out += '|'; break;
      default: out += escaped[i];
    }
  }
  return out;
}

std::string SpacingMisc(std::string_view trailing_whitespace) {
  if (trailing_whitespace.empty()) return "SpaceAfter=No";
  if (trailing_whitespace == " ") return "";
  return "SpacesAfter=" + EscapeSpaces(trailing_whitespace);
}

std::optional<std::string> MiscValue(std::string_view misc,
                                     std::string_view key) {
  if (misc == "_") return std::nullopt;
  for (std::string_view pair : Split(misc, '|')) {
    if (pair.size() > key.size() && pair.substr(0, key.size()) == key &&
        pair[key.size()] == '=') {
      return std::string(pair.substr(key.size() + 1));
    }
  }
  return std::nullopt;
}

ConlluSentence FromSpans(const SentenceSpan& span) {
  ConlluSentence s;
  std::string text = span.text;
  while (!text.empty() && IsSpace(text.back())) text.pop_back();
  std::replace_if(
      text.begin(), text.end(),
      [](char c) { return c == '\n' || c == '\r' || c == '\t'; }, ' ');
  s.comments.push_back("text = " + text);
  int id = 0;
  for (const TokenSpan& t : span.tokens) {
    ConlluToken row;
    row.id = ++id;
    row.form = t.form;
    const std::string misc = SpacingMisc(t.trailing_whitespace);
    row.misc = misc.empty() ? "_" : misc;
    s.tokens.push_back(std::move(row));
  }
  return s;
}

std::string EmitSlashed(const SlashedSentence& sentence) {
  std::string out;
  for (const auto& [form, tag] : sentence.pairs) {
    if (!out.empty()) out += ' ';
    out += form;
    out += '/';
    out += tag;
  }
  return out;
}

SlashedSentence ParseSlashed(std::string_view line) {
  SlashedSentence s;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && IsSpace(line[pos])) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !IsSpace(line[end])) ++end;
    if (end == pos) break;
    const std::string_view item = line.substr(pos, end - pos);
    const std::size_t slash = item.rfind('/');
    if (slash == std::string_view::npos || slash == 0 ||
        slash + 1 == item.size()) {
      throw Error(Errc::kMissingTag,
                  "item without form/tag: " + std::string(item));
    }
    s.pairs.emplace_back(std::string(item.substr(0, slash)),
                         std::string(item.substr(slash + 1)));
    pos = end;
  }
  return s;
}

}  // namespace dantools
