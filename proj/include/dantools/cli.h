#ifndef DANTOOLS_CLI_H_
#define DANTOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dantools::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Paths and stage selection for the ner and pipe commands. Empty means unset.
struct PipelineConfig {
  std::string abbreviations;
  std::string clusters;
  std::string ner_model;
  std::string pos_model;
  std::string parser_model;
  std::string lexicon;
  std::string stages = "tokenize,pos,lemma,parse";
};

// Reads "key = value" lines; '#' starts a comment line. Relative paths are
// taken relative to the file's directory. Throws std::invalid_argument on
// unknown keys or malformed lines and std::runtime_error when unreadable.
PipelineConfig ReadConfig(const std::string& path);

// args[0] is the program name. Payload goes to `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace dantools::cli

#endif  // DANTOOLS_CLI_H_
