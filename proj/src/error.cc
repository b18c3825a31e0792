#include "dantools/error.h"

namespace dantools {

const char* ErrcName(Errc code) {
  switch (code) {
    case Errc::kLineFieldCount: return "LineFieldCount";
    case Errc::kNonContiguousIds: return "NonContiguousIds";
    case Errc::kBadHead: return "BadHead";
    case Errc::kUnsupportedId: return "UnsupportedId";
    case Errc::kBadField: return "BadField";
    case Errc::kInvariantViolation: return "InvariantViolation";
    case Errc::kMissingTag: return "MissingTag";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kWindowTooSmall: return "WindowTooSmall";
    case Errc::kBadSize: return "BadSize";
    case Errc::kBadLine: return "BadLine";
    case Errc::kPositionOutOfRange: return "PositionOutOfRange";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kInvalidGold: return "InvalidGold";
    case Errc::kBadModel: return "BadModel";
    case Errc::kIllegalTransition: return "IllegalTransition";
    case Errc::kNonProjective: return "NonProjective";
  }
  return "Unknown";
}

namespace {

std::string Describe(Errc code, const std::string& message, int line) {
  std::string out = ErrcName(code);
  if (line > 0) out += " at line " + std::to_string(line);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, int line)
    : std::runtime_error(Describe(code, message, line)),
      code_(code),
      line_(line) {}

}  // namespace dantools
