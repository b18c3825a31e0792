#ifndef DANTOOLS_TESTS_TEST_UTIL_H_
#define DANTOOLS_TESTS_TEST_UTIL_H_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dantools::testing {

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string DataPath(const std::string& name) {
  return std::string(DANTOOLS_TEST_DATA) + "/" + name;
}

// The example sentence of the NER tool, in slashed-tag format.
inline constexpr const char* kNerExample =
    "En/O stor/O reform/O skal/O derfor/O blandt/O andet/O styrke/O "
    "tilliden/O til/O politikere/O og/O medier/O ,/O genopbygge/O "
    "tilliden/O til/O Skat/O og/O mindske/O de/O økonomiske/O forskelle/O "
    "i/O Danmark/B-LOC ./O";

inline constexpr const char* kNerExampleText =
    "En stor reform skal derfor blandt andet styrke tilliden til politikere "
    "og medier, genopbygge tilliden til Skat og mindske de økonomiske "
    "forskelle i Danmark.";

}  // namespace dantools::testing

#endif  // DANTOOLS_TESTS_TEST_UTIL_H_
