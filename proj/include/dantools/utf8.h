#ifndef DANTOOLS_UTF8_H_
#define DANTOOLS_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Case mapping covers ASCII and the Latin-1
// supplement, which is all Danish text needs; other code points map to
// themselves.
namespace dantools::utf8 {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed, >= 1
};

// Decodes the code point starting at byte `pos`. Malformed sequences decode
// as a single byte with value 0xFFFD so that scanning always progresses.
CodePoint Decode(std::string_view text, std::size_t pos);

void Append(std::string& out, char32_t cp);

bool IsUpper(char32_t cp);
bool IsLower(char32_t cp);
bool IsDigit(char32_t cp);
bool IsLetter(char32_t cp);
char32_t ToLower(char32_t cp);

std::string Lower(std::string_view text);

// Splits into code points, each as its own byte string.
std::vector<std::string_view> Chars(std::string_view text);

}  // namespace dantools::utf8

#endif  // DANTOOLS_UTF8_H_
