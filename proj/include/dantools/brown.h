#ifndef DANTOOLS_BROWN_H_
#define DANTOOLS_BROWN_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// Hierarchical word clustering over bigram statistics. A single windowed
// agglomerative run records its full merge history; clusterings of any size
// are then read off by replaying that history up to a cut.
namespace dantools::brown {

inline constexpr std::string_view kUnknownWord = "<unk>";

struct Bigram {
  int left = 0;
  int right = 0;
  std::int64_t count = 0;

  bool operator==(const Bigram&) const = default;
};

struct BigramStats {
  // Sorted by descending frequency, ties broken lexicographically. A word's
  // index in this list is its id everywhere below.
  std::vector<std::string> vocab;
  std::vector<std::int64_t> unigram_count;
  // Adjacent pairs within sentences, sorted by (left, right).
  std::vector<Bigram> bigrams;
  std::int64_t total_tokens = 0;
  std::int64_t sentences = 0;

  std::int64_t total_pairs() const { return total_tokens - sentences; }
  // -1 if absent.
  int Index(std::string_view word) const;

  bool operator==(const BigramStats&) const = default;
};

// Counts unigrams and within-sentence bigrams. Words seen fewer than
// `min_count` times are replaced by "<unk>" before counting. Empty
// sentences are skipped. Throws Error(EmptyCorpus) when there are no tokens.
BigramStats CountBigrams(const std::vector<std::vector<std::string>>& corpus,
                         std::int64_t min_count);
// One sentence per line, tokens separated by whitespace.
BigramStats CountBigrams(std::istream& corpus, std::int64_t min_count);

// Average mutual information, in bits, of the cluster-level bigram
// distribution. cluster_of[w] is the cluster label of word w, or -1 for a
// word that has not been introduced yet; pairs touching such words are left
// out of the sum. Cluster marginals are the left/right marginals of the full
// bigram distribution, so a cluster's marginal never depends on which other
// words are active.
double AverageMutualInformation(const BigramStats& stats,
                                std::span<const int> cluster_of);

struct Merge {
  int left = 0;    // the older of the two clusters (smaller id)
  int right = 0;
  int merged = 0;  // id of the new cluster
  double ami_delta = 0.0;  // AMI after the merge minus AMI before

  bool operator==(const Merge&) const = default;
};

// Leaves are word ids 0..n-1 (introduction order); merge k creates cluster
// id n + k.
struct MergeHistory {
  std::vector<std::string> leaves;
  std::vector<std::int64_t> counts;
  std::vector<Merge> merges;

  bool operator==(const MergeHistory&) const = default;
};

// Windowed agglomeration: seeds the `window` most frequent words as
// singleton clusters, then for every further word adds it as a new cluster
// and performs the merge with the smallest AMI loss; finally merges down to
// one cluster. Equal losses are resolved by the smallest (left, right) id
// pair. Throws Error(WindowTooSmall) for window < 2.
MergeHistory RunClustering(const BigramStats& stats, int window);

struct PathEntry {
  std::string word;
  std::string path;  // '0'/'1' characters
  std::int64_t count = 0;

  bool operator==(const PathEntry&) const = default;
};

// Bit-string cluster paths per word, kept sorted by (path, word).
class PathTable {
 public:
  PathTable() = default;
  explicit PathTable(std::vector<PathEntry> entries);

  const std::vector<PathEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  // nullptr when the word has no path.
  const std::string* Find(std::string_view word) const;

  bool operator==(const PathTable& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<PathEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Replays merges until exactly `m` clusters remain and labels each cluster
// by its path in the merge tree above the cut: the older child of every
// merge gets '0', the newer '1'. Throws Error(BadSize) unless
// 1 <= m <= number of leaves.
PathTable Cut(const MergeHistory& history, int m);

// Cluster label of every leaf after replaying until `m` clusters remain.
std::vector<int> CutAssignment(const MergeHistory& history, int m);

// "path<TAB>word<TAB>count" lines, sorted by path then word.
void WritePaths(std::ostream& out, const PathTable& table);
// Throws Error(BadLine) with the line number on malformed input.
PathTable ReadPaths(std::istream& in);
PathTable LoadPaths(const std::string& path);

}  // namespace dantools::brown

#endif  // DANTOOLS_BROWN_H_
