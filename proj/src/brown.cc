#include "dantools/brown.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <utility>

#include "dantools/error.h"
#include "dantools/textseg.h"

namespace dantools::brown {

namespace {

class Counter {
 public:
  void AddSentence(const std::vector<std::string_view>& tokens) {
    if (tokens.empty()) return;
    ++sentences_;
    int prev = -1;
    for (std::string_view token : tokens) {
      const int id = Intern(token);
      ++counts_[id];
      ++total_;
      if (prev >= 0) {
        ++pairs_[(static_cast<std::uint64_t>(prev) << 32) |
                 static_cast<std::uint32_t>(id)];
      }
      prev = id;
    }
  }

  BigramStats Finish(std::int64_t min_count) const {
    if (total_ == 0) throw Error(Errc::kEmptyCorpus, "corpus has no tokens");
    // Words below the threshold collapse into <unk>.
    std::unordered_map<std::string, std::int64_t> merged;
    for (std::size_t id = 0; id < words_.size(); ++id) {
      const bool rare = counts_[id] < min_count;
      merged[rare ? std::string(kUnknownWord) : words_[id]] += counts_[id];
    }
    std::vector<std::pair<std::string, std::int64_t>> order(merged.begin(),
                                                            merged.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    BigramStats stats;
    std::unordered_map<std::string, int> final_id;
    for (const auto& [word, count] : order) {
      final_id.emplace(word, static_cast<int>(stats.vocab.size()));
      stats.vocab.push_back(word);
      stats.unigram_count.push_back(count);
    }
    std::vector<int> remap(words_.size());
    for (std::size_t id = 0; id < words_.size(); ++id) {
      const bool rare = counts_[id] < min_count;
      remap[id] = final_id.at(rare ? std::string(kUnknownWord) : words_[id]);
    }

    std::unordered_map<std::uint64_t, std::int64_t> pairs;
    for (const auto& [key, count] : pairs_) {
      const int l = remap[key >> 32];
      const int r = remap[key & 0xFFFFFFFFu];
      pairs[(static_cast<std::uint64_t>(l) << 32) |
            static_cast<std::uint32_t>(r)] += count;
    }
    stats.bigrams.reserve(pairs.size());
    for (const auto& [key, count] : pairs) {
      stats.bigrams.push_back({static_cast<int>(key >> 32),
                               static_cast<int>(key & 0xFFFFFFFFu), count});
    }
    std::sort(stats.bigrams.begin(), stats.bigrams.end(),
              [](const Bigram& a, const Bigram& b) {
                return std::tie(a.left, a.right) < std::tie(b.left, b.right);
              });
    stats.total_tokens = total_;
    stats.sentences = sentences_;
    return stats;
  }

 private:
  int Intern(std::string_view token) {
    auto it = ids_.find(std::string(token));
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(words_.size());
    words_.emplace_back(token);
    counts_.push_back(0);
    ids_.emplace(words_.back(), id);
    return id;
  }

  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::int64_t> pairs_;
  std::int64_t total_ = 0;
  std::int64_t sentences_ = 0;
};

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && IsSpace(line[pos])) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !IsSpace(line[end])) ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double Log2(std::int64_t x) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1 << 16);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = std::log2(static_cast<double>(i));
    }
    return t;
  }();
  if (x < static_cast<std::int64_t>(table.size())) return table[x];
  return std::log2(static_cast<double>(x));
}

// Merge-loss bookkeeping over a window of at most W + 1 active clusters,
// each occupying a slot. For active slots i, j:
//   q(i, j)  = p(i, j) log2(p(i, j) / (p_left(i) p_right(j)))
//   sum(i)   = all q terms touching i
//   loss(i, j) = AMI before merging i and j minus AMI after.
// Losses are updated incrementally on every insertion and merge, which
// costs O(W^2) per step instead of the O(W^3) of recomputing them.
class Engine {
 public:
  Engine(const BigramStats& stats, int window)
      : stats_(stats),
        vocab_size_(static_cast<int>(stats.vocab.size())),
        slots_(std::min(window, vocab_size_) + 1) {
    const std::int64_t pairs = stats.total_pairs();
    inv_total_ = pairs > 0 ? 1.0 / static_cast<double>(pairs) : 0.0;
    log_total_ = pairs > 0 ? Log2(pairs) : 0.0;

    right_begin_.assign(vocab_size_ + 1, 0);
    left_begin_.assign(vocab_size_ + 1, 0);
    left_count_.assign(vocab_size_, 0);
    right_count_.assign(vocab_size_, 0);
    for (const Bigram& b : stats.bigrams) {
      ++right_begin_[b.left + 1];
      ++left_begin_[b.right + 1];
      left_count_[b.left] += b.count;
      right_count_[b.right] += b.count;
    }
    for (int w = 0; w < vocab_size_; ++w) {
      right_begin_[w + 1] += right_begin_[w];
      left_begin_[w + 1] += left_begin_[w];
    }
    right_.resize(stats.bigrams.size());
    left_.resize(stats.bigrams.size());
    std::vector<std::size_t> rfill(right_begin_.begin(), right_begin_.end() - 1);
    std::vector<std::size_t> lfill(left_begin_.begin(), left_begin_.end() - 1);
    for (const Bigram& b : stats.bigrams) {
      right_[rfill[b.left]++] = {b.right, b.count};
      left_[lfill[b.right]++] = {b.left, b.count};
    }

    const std::size_t cells = static_cast<std::size_t>(slots_) * slots_;
    n2_.assign(cells, 0);
    q2_.assign(cells, 0.0);
    loss_.assign(cells, 0.0);
    nl_.assign(slots_, 0);
    nr_.assign(slots_, 0);
    log_nl_.assign(slots_, 0.0);
    log_nr_.assign(slots_, 0.0);
    sum_.assign(slots_, 0.0);
    cluster_.assign(slots_, -1);
    members_.assign(slots_, {});
    word_slot_.assign(vocab_size_, -1);
  }

  MergeHistory Run() {
    MergeHistory history;
    history.leaves = stats_.vocab;
    history.counts = stats_.unigram_count;
    next_id_ = vocab_size_;
    if (vocab_size_ == 0) return history;

    const int seeds = std::min(slots_ - 1, vocab_size_);
    Seed(seeds);
    for (int w = seeds; w < vocab_size_; ++w) {
      Insert(w, free_.back());
      free_.pop_back();
      MergeBest(history);
    }
    while (active_.size() > 1) MergeBest(history);
    return history;
  }

 private:
  struct Neighbor {
    int word;
    std::int64_t count;
  };

  std::int64_t& N(int i, int j) { return n2_[i * slots_ + j]; }
  double& Qc(int i, int j) { return q2_[i * slots_ + j]; }
  double& Loss(int i, int j) {
    return i < j ? loss_[i * slots_ + j] : loss_[j * slots_ + i];
  }

  double Q(std::int64_t n, double log_l, double log_r) const {
    if (n == 0) return 0.0;
    return static_cast<double>(n) * inv_total_ *
           (Log2(n) + log_total_ - log_l - log_r);
  }

  void SetMarginals(int s, std::int64_t nl, std::int64_t nr) {
    nl_[s] = nl;
    nr_[s] = nr;
    log_nl_[s] = Log2(nl);
    log_nr_[s] = Log2(nr);
  }

  void RefreshQ(int k) {
    for (int d : active_) {
      Qc(k, d) = Q(N(k, d), log_nl_[k], log_nr_[d]);
      Qc(d, k) = Q(N(d, k), log_nl_[d], log_nr_[k]);
    }
  }

  void RefreshSums() {
    for (int x : active_) {
      double s = -Qc(x, x);
      for (int d : active_) s += Qc(x, d) + Qc(d, x);
      sum_[x] = s;
    }
  }

  double FullLoss(int i, int j) {
    const double before = sum_[i] + sum_[j] - Qc(i, j) - Qc(j, i);
    const double log_l = Log2(nl_[i] + nl_[j]);
    const double log_r = Log2(nr_[i] + nr_[j]);
    double after = Q(N(i, i) + N(i, j) + N(j, i) + N(j, j), log_l, log_r);
    for (int d : active_) {
      if (d == i || d == j) continue;
      after += Q(N(i, d) + N(j, d), log_l, log_nr_[d]);
      after += Q(N(d, i) + N(d, j), log_nl_[d], log_r);
    }
    return before - after;
  }

  void Activate(int w, int s) {
    cluster_[s] = w;
    word_slot_[w] = s;
    members_[s] = {w};
    active_.insert(std::lower_bound(active_.begin(), active_.end(), s), s);
  }

  void Seed(int seeds) {
    for (int s = 0; s < seeds; ++s) Activate(s, s);
    for (int s = seeds; s < slots_; ++s) free_.push_back(s);
    std::reverse(free_.begin(), free_.end());
    for (int w = 0; w < seeds; ++w) {
      for (std::size_t k = right_begin_[w]; k < right_begin_[w + 1]; ++k) {
        const int t = word_slot_[right_[k].word];
        if (t >= 0) N(w, t) += right_[k].count;
      }
      SetMarginals(w, left_count_[w], right_count_[w]);
    }
    for (int s : active_) RefreshQ(s);
    RefreshSums();
    for (std::size_t a = 0; a < active_.size(); ++a) {
      for (std::size_t b = a + 1; b < active_.size(); ++b) {
        Loss(active_[a], active_[b]) = FullLoss(active_[a], active_[b]);
      }
    }
  }

  void Insert(int w, int k) {
    for (int d : active_) N(k, d) = N(d, k) = 0;
    N(k, k) = 0;
    Activate(w, k);
    for (std::size_t e = right_begin_[w]; e < right_begin_[w + 1]; ++e) {
      const int t = word_slot_[right_[e].word];
      if (t >= 0) N(k, t) += right_[e].count;
    }
    for (std::size_t e = left_begin_[w]; e < left_begin_[w + 1]; ++e) {
      if (left_[e].word == w) continue;
      const int t = word_slot_[left_[e].word];
      if (t >= 0) N(t, k) += left_[e].count;
    }
    SetMarginals(k, left_count_[w], right_count_[w]);
    RefreshQ(k);

    std::vector<double> touch(slots_, 0.0);
    for (int x : active_) touch[x] = Qc(x, k) + Qc(k, x);
    for (std::size_t a = 0; a < active_.size(); ++a) {
      const int i = active_[a];
      if (i == k) continue;
      for (std::size_t b = a + 1; b < active_.size(); ++b) {
        const int j = active_[b];
        if (j == k) continue;
        const double log_l = Log2(nl_[i] + nl_[j]);
        const double log_r = Log2(nr_[i] + nr_[j]);
        Loss(i, j) += touch[i] + touch[j] -
                      Q(N(i, k) + N(j, k), log_l, log_nr_[k]) -
                      Q(N(k, i) + N(k, j), log_nl_[k], log_r);
      }
    }
    RefreshSums();
    for (int i : active_) {
      if (i != k) Loss(i, k) = FullLoss(i, k);
    }
  }

  void MergeBest(MergeHistory& history) {
    constexpr double kTie = 1e-10;
    int best_i = -1;
    int best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_ids;
    for (std::size_t a = 0; a < active_.size(); ++a) {
      for (std::size_t b = a + 1; b < active_.size(); ++b) {
        const int i = active_[a];
        const int j = active_[b];
        const double l = Loss(i, j);
        const std::pair<int, int> ids = std::minmax(cluster_[i], cluster_[j]);
        if (best_i < 0 || l < best - kTie ||
            (l <= best + kTie && ids < best_ids)) {
          best = l;
          best_i = i;
          best_j = j;
          best_ids = ids;
        }
      }
    }
    history.merges.push_back(
        {best_ids.first, best_ids.second, next_id_, -best});
    MergeSlots(best_i, best_j);
  }

  // Merges slot b into slot a; b becomes free.
  void MergeSlots(int a, int b) {
    const std::int64_t nl_ab = nl_[a] + nl_[b];
    const std::int64_t nr_ab = nr_[a] + nr_[b];
    const double log_l_ab = Log2(nl_ab);
    const double log_r_ab = Log2(nr_ab);

    std::vector<int> rest;
    rest.reserve(active_.size());
    for (int x : active_) {
      if (x != a && x != b) rest.push_back(x);
    }
    std::vector<double> gone(slots_, 0.0);
    std::vector<double> gained(slots_, 0.0);
    for (int x : rest) {
      gone[x] = Qc(x, a) + Qc(a, x) + Qc(x, b) + Qc(b, x);
      gained[x] = Q(N(a, x) + N(b, x), log_l_ab, log_nr_[x]) +
                  Q(N(x, a) + N(x, b), log_nl_[x], log_r_ab);
    }
    for (std::size_t p = 0; p < rest.size(); ++p) {
      const int i = rest[p];
      for (std::size_t r = p + 1; r < rest.size(); ++r) {
        const int j = rest[r];
        const double log_l = Log2(nl_[i] + nl_[j]);
        const double log_r = Log2(nr_[i] + nr_[j]);
        const std::int64_t to_a = N(i, a) + N(j, a);
        const std::int64_t to_b = N(i, b) + N(j, b);
        const std::int64_t from_a = N(a, i) + N(a, j);
        const std::int64_t from_b = N(b, i) + N(b, j);
        Loss(i, j) += gained[i] + gained[j] - gone[i] - gone[j] +
                      Q(to_a, log_l, log_nr_[a]) +
                      Q(from_a, log_nl_[a], log_r) +
                      Q(to_b, log_l, log_nr_[b]) +
                      Q(from_b, log_nl_[b], log_r) -
                      Q(to_a + to_b, log_l, log_r_ab) -
                      Q(from_a + from_b, log_l_ab, log_r);
      }
    }

    const std::int64_t self = N(a, a) + N(a, b) + N(b, a) + N(b, b);
    for (int x : rest) {
      N(a, x) += N(b, x);
      N(x, a) += N(x, b);
    }
    N(a, a) = self;
    SetMarginals(a, nl_ab, nr_ab);
    for (int w : members_[b]) word_slot_[w] = a;
    members_[a].insert(members_[a].end(), members_[b].begin(),
                       members_[b].end());
    members_[b].clear();
    cluster_[a] = next_id_++;
    cluster_[b] = -1;
    active_.erase(std::find(active_.begin(), active_.end(), b));
    free_.push_back(b);

    RefreshQ(a);
    RefreshSums();
    for (int i : rest) Loss(i, a) = FullLoss(i, a);
  }

  const BigramStats& stats_;
  int vocab_size_;
  int slots_;
  double inv_total_ = 0.0;
  double log_total_ = 0.0;

  std::vector<std::size_t> right_begin_, left_begin_;
  std::vector<Neighbor> right_, left_;
  std::vector<std::int64_t> left_count_, right_count_;

  std::vector<std::int64_t> n2_;
  std::vector<double> q2_, loss_;
  std::vector<std::int64_t> nl_, nr_;
  std::vector<double> log_nl_, log_nr_, sum_;
  std::vector<int> cluster_;
  std::vector<std::vector<int>> members_;
  std::vector<int> word_slot_;
  std::vector<int> active_;  // sorted slot indices
  std::vector<int> free_;
  int next_id_ = 0;
};

bool ParseCount(std::string_view s, std::int64_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

}  // namespace

int BigramStats::Index(std::string_view word) const {
  const auto it = std::find(vocab.begin(), vocab.end(), word);
  return it == vocab.end() ? -1 : static_cast<int>(it - vocab.begin());
}

BigramStats CountBigrams(const std::vector<std::vector<std::string>>& corpus,
                         std::int64_t min_count) {
  Counter counter;
  std::vector<std::string_view> tokens;
  for (const auto& sentence : corpus) {
    tokens.assign(sentence.begin(), sentence.end());
    counter.AddSentence(tokens);
  }
  return counter.Finish(min_count);
}

BigramStats CountBigrams(std::istream& corpus, std::int64_t min_count) {
  Counter counter;
  std::string line;
  while (std::getline(corpus, line)) counter.AddSentence(SplitWhitespace(line));
  return counter.Finish(min_count);
}

double AverageMutualInformation(const BigramStats& stats,
                                std::span<const int> cluster_of) {
  const std::int64_t total = stats.total_pairs();
  if (total <= 0) return 0.0;
  std::map<int, std::int64_t> left, right;
  std::map<std::pair<int, int>, std::int64_t> joint;
  for (const Bigram& b : stats.bigrams) {
    const int c = cluster_of[b.left];
    const int d = cluster_of[b.right];
    if (c >= 0) left[c] += b.count;
    if (d >= 0) right[d] += b.count;
    if (c >= 0 && d >= 0) joint[{c, d}] += b.count;
  }
  const double n = static_cast<double>(total);
  double ami = 0.0;
  for (const auto& [pair, count] : joint) {
    const double p = static_cast<double>(count) / n;
    const double pl = static_cast<double>(left[pair.first]) / n;
    const double pr = static_cast<double>(right[pair.second]) / n;
    ami += p * std::log2(p / (pl * pr));
  }
  return ami;
}

MergeHistory RunClustering(const BigramStats& stats, int window) {
  if (window < 2) {
    throw Error(Errc::kWindowTooSmall,
                "window must be at least 2, got " + std::to_string(window));
  }
  return Engine(stats, window).Run();
}

PathTable::PathTable(std::vector<PathEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const PathEntry& a, const PathEntry& b) {
              return std::tie(a.path, a.word) < std::tie(b.path, b.word);
            });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(entries_[i].word, i);
  }
}

const std::string* PathTable::Find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &entries_[it->second].path;
}

std::vector<int> CutAssignment(const MergeHistory& history, int m) {
  const int leaves = static_cast<int>(history.leaves.size());
  if (m < 1 || m > leaves) {
    throw Error(Errc::kBadSize, "cut size " + std::to_string(m) +
                                    " outside 1.." + std::to_string(leaves));
  }
  const int applied = leaves - m;
  std::vector<int> parent(leaves + applied, -1);
  for (int k = 0; k < applied; ++k) {
    const Merge& merge = history.merges[k];
    parent[merge.left] = merge.merged;
    parent[merge.right] = merge.merged;
  }
  std::vector<int> top(leaves);
  for (int w = 0; w < leaves; ++w) {
    int c = w;
    while (parent[c] >= 0) c = parent[c];
    top[w] = c;
  }
  return top;
}

PathTable Cut(const MergeHistory& history, int m) {
  const std::vector<int> top = CutAssignment(history, m);
  const int leaves = static_cast<int>(history.leaves.size());
  std::vector<std::string> path(leaves + history.merges.size());
  for (int k = static_cast<int>(history.merges.size()) - 1;
       k >= leaves - m; --k) {
    const Merge& merge = history.merges[k];
    path[merge.left] = path[merge.merged] + '0';
    path[merge.right] = path[merge.merged] + '1';
  }
  std::vector<PathEntry> entries;
  entries.reserve(leaves);
  for (int w = 0; w < leaves; ++w) {
    entries.push_back({history.leaves[w], path[top[w]], history.counts[w]});
  }
  return PathTable(std::move(entries));
}

void WritePaths(std::ostream& out, const PathTable& table) {
  for (const PathEntry& e : table.entries()) {
    out << e.path << '\t' << e.word << '\t' << e.count << '\n';
  }
}

PathTable ReadPaths(std::istream& in) {
  std::vector<PathEntry> entries;
  std::unordered_map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 =
        t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw Error(Errc::kBadLine, "expected path<TAB>word<TAB>count", line_no);
    }
    PathEntry e;
    e.path = line.substr(0, t1);
    e.word = line.substr(t1 + 1, t2 - t1 - 1);
    if (e.path.find_first_not_of("01") != std::string::npos) {
      throw Error(Errc::kBadLine, "path must consist of 0 and 1", line_no);
    }
    if (e.word.empty()) throw Error(Errc::kBadLine, "empty word", line_no);
    if (!ParseCount(std::string_view(line).substr(t2 + 1), e.count)) {
      throw Error(Errc::kBadLine, "bad count", line_no);
    }
    if (!seen.emplace(e.word, line_no).second) {
      throw Error(Errc::kBadLine, "duplicate word " + e.word, line_no);
    }
    entries.push_back(std::move(e));
  }
  return PathTable(std::move(entries));
}

PathTable LoadPaths(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read cluster paths " + path);
  return ReadPaths(in);
}

}  // namespace dantools::brown
