#ifndef DANTOOLS_ERROR_H_
#define DANTOOLS_ERROR_H_

#include <stdexcept>
#include <string>

namespace dantools {

enum class Errc {
  // conllu
  kLineFieldCount,
  kNonContiguousIds,
  kBadHead,
  kUnsupportedId,
  kBadField,
  kInvariantViolation,
  kMissingTag,
  // brown
  kEmptyCorpus,
  kWindowTooSmall,
  kBadSize,
  kBadLine,
  // seqtag
  kPositionOutOfRange,
  kEmptyInput,
  kInvalidGold,
  kBadModel,
  // depparse
  kIllegalTransition,
  kNonProjective,
};

const char* ErrcName(Errc code);

// All library failures are reported with this exception. Errors tied to a
// position in a text stream carry its 1-based line number; line() is 0
// otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, int line = 0);

  Errc code() const { return code_; }
  int line() const { return line_; }

 private:
  Errc code_;
  int line_;
};

}  // namespace dantools

#endif  // DANTOOLS_ERROR_H_
