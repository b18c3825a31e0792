#include "dantools/utf8.h"

namespace dantools::utf8 {

CodePoint Decode(std::string_view text, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > text.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[pos + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

void Append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsUpper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

bool IsLower(char32_t cp) {
  if (cp >= 'a' && cp <= 'z') return true;
  return cp >= 0xDF && cp <= 0xFF && cp != 0xF7;
}

bool IsDigit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool IsLetter(char32_t cp) {
  if (IsUpper(cp) || IsLower(cp)) return true;
  if (cp < 0x100) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  // Beyond Latin-1 only a handful of punctuation blocks are excluded.
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  return true;
}

char32_t ToLower(char32_t cp) {
  if (IsUpper(cp)) return cp + 0x20;
  return cp;
}

std::string Lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const CodePoint c = Decode(text, pos);
    if (c.value < 0x80 || IsUpper(c.value)) {
      Append(out, ToLower(c.value));
    } else {
      out.append(text.substr(pos, c.length));
    }
    pos += c.length;
  }
  return out;
}

std::vector<std::string_view> Chars(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = Decode(text, pos).length;
    out.push_back(text.substr(pos, len));
    pos += len;
  }
  return out;
}

}  // namespace dantools::utf8
