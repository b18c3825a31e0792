#include "dantools/seqtag.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "dantools/error.h"
#include "dantools/utf8.h"

namespace dantools {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr const char* kModelMagic = "dantools-model";
constexpr int kModelVersion = 1;
constexpr const char* kStartLabel = "<START>";

std::string Offset(int k) {
  if (k > 0) return "+" + std::to_string(k);
  return std::to_string(k);
}

std::string FormatWeight(double w) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, r.ptr);
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = line.find('\t', start);
    if (k == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, k - start));
    start = k + 1;
  }
}

Scheme ParseScheme(std::string_view name, int line) {
  if (name == "BIO") return Scheme::kBio;
  if (name == "PLAIN") return Scheme::kPlain;
  if (name == "TRANSITION") return Scheme::kTransition;
  throw Error(Errc::kBadModel, "unknown scheme " + std::string(name), line);
}

}  // namespace

const char* SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kBio: return "BIO";
    case Scheme::kPlain: return "PLAIN";
    case Scheme::kTransition: return "TRANSITION";
  }
  return "PLAIN";
}

TagSet::TagSet(Scheme scheme, std::vector<std::string> labels)
    : scheme_(scheme), labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    index_.emplace(labels_[i], static_cast<int>(i));
    std::string type;
    bool inside = false;
    if (scheme_ == Scheme::kBio && labels_[i].size() > 2 &&
        labels_[i][1] == '-') {
      type = labels_[i].substr(2);
      inside = labels_[i][0] == 'I';
    }
    type_.push_back(type);
    inside_.push_back(inside);
  }
}

TagSet TagSet::Bio(const std::vector<std::string>& types) {
  std::vector<std::string> labels = {"O"};
  for (const auto& t : types) {
    labels.push_back("B-" + t);
    labels.push_back("I-" + t);
  }
  return TagSet(Scheme::kBio, labels);
}

TagSet TagSet::Ner() { return Bio({"PER", "LOC", "ORG"}); }

TagSet TagSet::Upos() { return TagSet(Scheme::kPlain, UposTags()); }

int TagSet::Index(std::string_view label) const {
  const auto it = index_.find(std::string(label));
  return it == index_.end() ? -1 : it->second;
}

bool TagSet::Allowed(int prev, int next) const {
  if (scheme_ != Scheme::kBio || !inside_[next]) return true;
  return prev >= 0 && type_[prev] == type_[next];
}

bool IsBioValid(std::span<const std::string> labels) {
  std::string_view prev_type;
  for (const std::string& l : labels) {
    const bool tagged = l.size() > 2 && l[1] == '-';
    const std::string_view type =
        tagged ? std::string_view(l).substr(2) : std::string_view();
    if (tagged && l[0] == 'I' && (prev_type.empty() || prev_type != type)) {
      return false;
    }
    prev_type = type;
  }
  return true;
}

std::pair<std::string, std::string> WordShape(std::string_view form) {
  std::string full;
  std::string compressed;
  std::string last;
  for (std::size_t pos = 0; pos < form.size();) {
    const utf8::CodePoint c = utf8::Decode(form, pos);
    std::string piece;
    if (utf8::IsUpper(c.value)) {
      piece = "X";
    } else if (utf8::IsLower(c.value)) {
      piece = "x";
    } else if (utf8::IsDigit(c.value)) {
      piece = "d";
    } else {
      piece = std::string(form.substr(pos, c.length));
    }
    full += piece;
    if (piece != last) compressed += piece;
    last = std::move(piece);
    pos += c.length;
  }
  return {full, compressed};
}

FeatureVector ExtractFeatures(std::span<const std::string> forms,
                              std::size_t i,
                              const brown::PathTable* clusters) {
  if (i >= forms.size()) {
    throw Error(Errc::kPositionOutOfRange,
                "position " + std::to_string(i) + " in sentence of length " +
                    std::to_string(forms.size()));
  }
  const int n = static_cast<int>(forms.size());
  const int at = static_cast<int>(i);
  auto in_range = [&](int k) { return at + k >= 0 && at + k < n; };
  auto raw = [&](int k) -> std::string {
    if (at + k < 0) return "<s>";
    if (at + k >= n) return "</s>";
    return forms[at + k];
  };
  std::vector<std::string> lower(5);
  for (int k = -2; k <= 2; ++k) {
    lower[k + 2] = in_range(k) ? utf8::Lower(forms[at + k]) : raw(k);
  }

  FeatureVector f;
  f.push_back("bias");
  for (int k = -2; k <= 2; ++k) {
    f.push_back("w" + Offset(k) + "=" + lower[k + 2]);
  }

  const std::vector<std::string_view> chars = utf8::Chars(forms[i]);
  for (std::size_t len = 1; len <= 4 && len <= chars.size(); ++len) {
    std::string prefix, suffix;
    for (std::size_t c = 0; c < len; ++c) {
      prefix += chars[c];
      suffix += chars[chars.size() - len + c];
    }
    f.push_back("pre" + std::to_string(len) + "=" + prefix);
    f.push_back("suf" + std::to_string(len) + "=" + suffix);
  }

  for (int k = -1; k <= 1; ++k) {
    if (in_range(k)) {
      const auto [full, compressed] = WordShape(forms[at + k]);
      f.push_back("shape" + Offset(k) + "=" + compressed);
      f.push_back("fshape" + Offset(k) + "=" + full);
    } else {
      f.push_back("shape" + Offset(k) + "=" + raw(k));
      f.push_back("fshape" + Offset(k) + "=" + raw(k));
    }
  }

  // Token n-grams of order 2..5 inside the +-2 window that cover position i.
  for (int order = 2; order <= 5; ++order) {
    for (int first = -2; first <= 0; ++first) {
      const int last = first + order - 1;
      if (last < 0 || last > 2) continue;
      std::string name, value;
      for (int k = first; k <= last; ++k) {
        name += "w" + Offset(k);
        if (k > first) value += '_';
        value += lower[k + 2];
      }
      f.push_back(name + "=" + value);
    }
  }

  if (clusters != nullptr) {
    for (int k = -1; k <= 1; ++k) {
      if (!in_range(k)) continue;
      const std::string* path = clusters->Find(forms[at + k]);
      if (path == nullptr) path = clusters->Find(lower[k + 2]);
      if (path == nullptr) continue;
      for (std::size_t len : {4, 6, 10, 20}) {
        f.push_back("bc" + std::to_string(len) + "_" +
                    (k == 0 ? std::string("0") : Offset(k)) + "=" +
                    path->substr(0, len));
      }
    }
  }
  return f;
}

LinearModel::LinearModel(TagSet tags)
    : tags_(std::move(tags)),
      transition_((tags_.size() + 1) * tags_.size(), 0.0) {}

double LinearModel::Emission(const std::string& feature, int label) const {
  const auto it = emission_.find(feature);
  return it == emission_.end() ? 0.0 : it->second[label];
}

double LinearModel::Transition(int prev, int label) const {
  return transition_[(prev + 1) * tags_.size() + label];
}

std::vector<double> LinearModel::Scores(const FeatureVector& features) const {
  std::vector<double> scores(tags_.size(), 0.0);
  for (const std::string& f : features) {
    const auto it = emission_.find(f);
    if (it == emission_.end()) continue;
    for (std::size_t y = 0; y < scores.size(); ++y) scores[y] += it->second[y];
  }
  return scores;
}

std::vector<double>& LinearModel::MutableEmission(const std::string& feature) {
  auto it = emission_.find(feature);
  if (it == emission_.end()) {
    it = emission_.emplace(feature, std::vector<double>(tags_.size(), 0.0))
             .first;
  }
  return it->second;
}

double& LinearModel::MutableTransition(int prev, int label) {
  return transition_[(prev + 1) * tags_.size() + label];
}

std::size_t LinearModel::NonZero() const {
  std::size_t n = 0;
  for (const auto& [f, w] : emission_) {
    n += std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; });
  }
  n += std::count_if(transition_.begin(), transition_.end(),
                     [](double x) { return x != 0.0; });
  return n;
}

void LinearModel::Write(std::ostream& out) const {
  out << kModelMagic << '\t' << kModelVersion << '\t'
      << SchemeName(tags_.scheme()) << '\t';
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (i > 0) out << ' ';
    out << tags_.label(static_cast<int>(i));
  }
  out << '\n';
  const char kind = tags_.scheme() == Scheme::kTransition ? 'P' : 'E';
  std::vector<const std::string*> keys;
  keys.reserve(emission_.size());
  for (const auto& [f, w] : emission_) keys.push_back(&f);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* f : keys) {
    const std::vector<double>& w = emission_.at(*f);
    for (std::size_t y = 0; y < w.size(); ++y) {
      if (w[y] == 0.0) continue;
      out << kind << '\t' << *f << '\t' << tags_.label(static_cast<int>(y))
          << '\t' << FormatWeight(w[y]) << '\n';
    }
  }
  const int labels = static_cast<int>(tags_.size());
  for (int prev = -1; prev < labels; ++prev) {
    for (int y = 0; y < labels; ++y) {
      const double w = Transition(prev, y);
      if (w == 0.0) continue;
      out << "T\t" << (prev < 0 ? std::string(kStartLabel) : tags_.label(prev))
          << '\t' << tags_.label(y) << '\t' << FormatWeight(w) << '\n';
    }
  }
}

LinearModel LinearModel::Read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::kBadModel, "missing header", 1);
  }
  const auto header = SplitTabs(line);
  if (header.size() != 4 || header[0] != kModelMagic) {
    throw Error(Errc::kBadModel, "not a dantools model", 1);
  }
  if (header[1] != std::to_string(kModelVersion)) {
    throw Error(Errc::kBadModel,
                "unsupported model version " + std::string(header[1]), 1);
  }
  const Scheme scheme = ParseScheme(header[2], 1);
  std::vector<std::string> labels;
  {
    std::istringstream ls{std::string(header[3])};
    for (std::string l; ls >> l;) labels.push_back(l);
  }
  if (labels.empty()) throw Error(Errc::kBadModel, "empty label set", 1);
  LinearModel model{TagSet(scheme, labels)};
  const char emission_kind = scheme == Scheme::kTransition ? 'P' : 'E';

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = SplitTabs(line);
    if (f.size() != 4 || f[0].size() != 1) {
      throw Error(Errc::kBadModel, "expected kind<TAB>key<TAB>label<TAB>weight",
                  line_no);
    }
    const int y = model.tags_.Index(f[2]);
    if (y < 0) {
      throw Error(Errc::kBadModel, "unknown label " + std::string(f[2]),
                  line_no);
    }
    double w = 0.0;
    const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), w);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size() ||
        !std::isfinite(w)) {
      throw Error(Errc::kBadModel, "bad weight " + std::string(f[3]), line_no);
    }
    if (f[0][0] == emission_kind) {
      if (f[1].empty()) throw Error(Errc::kBadModel, "empty feature", line_no);
      model.MutableEmission(std::string(f[1]))[y] = w;
    } else if (f[0][0] == 'T') {
      const int prev = f[1] == kStartLabel ? -1 : model.tags_.Index(f[1]);
      if (prev < 0 && f[1] != kStartLabel) {
        throw Error(Errc::kBadModel, "unknown label " + std::string(f[1]),
                    line_no);
      }
      model.MutableTransition(prev, y) = w;
    } else {
      throw Error(Errc::kBadModel, "unknown record kind " + std::string(f[0]),
                  line_no);
    }
  }
  return model;
}

LinearModel LinearModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model " + path);
  return Read(in);
}

void LinearModel::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model " + path);
  Write(out);
}

bool LinearModel::operator==(const LinearModel& other) const {
  if (!(tags_ == other.tags_) || transition_ != other.transition_) return false;
  auto covered = [](const LinearModel& a, const LinearModel& b) {
    for (const auto& [f, w] : a.emission_) {
      for (std::size_t y = 0; y < w.size(); ++y) {
        if (w[y] != b.Emission(f, static_cast<int>(y))) return false;
      }
    }
    return true;
  };
  return covered(*this, other) && covered(other, *this);
}

void AveragedPerceptron::UpdateEmission(const std::string& feature, int label,
                                        double delta) {
  current_.MutableEmission(feature)[label] += delta;
  sums_.MutableEmission(feature)[label] +=
      static_cast<double>(steps_ + 1) * delta;
}

void AveragedPerceptron::UpdateTransition(int prev, int label, double delta) {
  current_.MutableTransition(prev, label) += delta;
  sums_.MutableTransition(prev, label) +=
      static_cast<double>(steps_ + 1) * delta;
}

// Averaging weights after each of T steps: an update of size d made at step
// t contributes d * (T - t + 1) / T, so avg = (w * (T + 1) - sum t * d) / T.
LinearModel AveragedPerceptron::Averaged() const {
  const TagSet& tags = current_.tags();
  LinearModel avg(tags);
  if (steps_ == 0) return avg;
  const double t = static_cast<double>(steps_);
  for (const auto& [feature, w] : current_.emission_) {
    const std::vector<double>& u = sums_.emission_.at(feature);
    std::vector<double> a(w.size());
    bool any = false;
    for (std::size_t y = 0; y < w.size(); ++y) {
      a[y] = (w[y] * (t + 1) - u[y]) / t;
      any = any || a[y] != 0.0;
    }
    if (any) avg.emission_.emplace(feature, std::move(a));
  }
  for (std::size_t k = 0; k < avg.transition_.size(); ++k) {
    avg.transition_[k] =
        (current_.transition_[k] * (t + 1) - sums_.transition_[k]) / t;
  }
  return avg;
}

std::vector<int> Viterbi(const LinearModel& model,
                         const std::vector<FeatureVector>& features) {
  if (features.empty()) throw Error(Errc::kEmptyInput, "empty sentence");
  const TagSet& tags = model.tags();
  const int labels = static_cast<int>(tags.size());
  const std::size_t n = features.size();
  std::vector<double> best(n * labels, kNegInf);
  std::vector<int> back(n * labels, -1);

  std::vector<double> emit = model.Scores(features[0]);
  for (int y = 0; y < labels; ++y) {
    if (tags.Allowed(-1, y)) best[y] = emit[y] + model.Transition(-1, y);
  }
  for (std::size_t i = 1; i < n; ++i) {
    emit = model.Scores(features[i]);
    for (int y = 0; y < labels; ++y) {
      double top = kNegInf;
      int arg = -1;
      for (int p = 0; p < labels; ++p) {
        const double prev = best[(i - 1) * labels + p];
        if (prev == kNegInf || !tags.Allowed(p, y)) continue;
        const double s = prev + model.Transition(p, y);
        if (arg < 0 || s > top) {
          top = s;
          arg = p;
        }
      }
      if (arg >= 0) {
        best[i * labels + y] = top + emit[y];
        back[i * labels + y] = arg;
      }
    }
  }
  int y = -1;
  double top = kNegInf;
  for (int k = 0; k < labels; ++k) {
    const double s = best[(n - 1) * labels + k];
    if (s == kNegInf) continue;
    if (y < 0 || s > top) {
      top = s;
      y = k;
    }
  }
  std::vector<int> path(n);
  for (std::size_t i = n; i-- > 0;) {
    path[i] = y;
    y = back[i * labels + y];
  }
  return path;
}

double SequenceScore(const LinearModel& model,
                     const std::vector<FeatureVector>& features,
                     std::span<const int> labels) {
  double score = 0.0;
  int prev = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!model.tags().Allowed(prev, labels[i])) return kNegInf;
    score += model.Transition(prev, labels[i]);
    score += model.Scores(features[i])[labels[i]];
    prev = labels[i];
  }
  return score;
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed,
                                       int epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL *
                                 static_cast<std::uint64_t>(epoch + 1));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  return order;
}

LinearModel TrainTagger(const std::vector<TaggedSentence>& examples,
                        const TagSet& tags, const brown::PathTable* clusters,
                        const TrainOptions& options) {
  std::vector<std::vector<FeatureVector>> features(examples.size());
  std::vector<std::vector<int>> gold(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const TaggedSentence& ex = examples[e];
    if (ex.forms.size() != ex.labels.size()) {
      throw Error(Errc::kInvalidGold, "sentence " + std::to_string(e + 1) +
                                          ": forms and labels differ in length");
    }
    for (std::size_t i = 0; i < ex.forms.size(); ++i) {
      features[e].push_back(ExtractFeatures(ex.forms, i, clusters));
      const int y = tags.Index(ex.labels[i]);
      if (y < 0) {
        throw Error(Errc::kInvalidGold, "sentence " + std::to_string(e + 1) +
                                            ": unknown label " + ex.labels[i]);
      }
      gold[e].push_back(y);
    }
    if (tags.scheme() == Scheme::kBio && !IsBioValid(ex.labels)) {
      throw Error(Errc::kInvalidGold,
                  "sentence " + std::to_string(e + 1) + ": invalid BIO sequence");
    }
  }

  AveragedPerceptron perceptron(tags);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t e : ShuffledOrder(examples.size(), options.seed, epoch)) {
      if (features[e].empty()) {
        perceptron.Tick();
        continue;
      }
      const std::vector<int> pred = Viterbi(perceptron.current(), features[e]);
      const std::vector<int>& g = gold[e];
      for (std::size_t i = 0; i < g.size(); ++i) {
        total += 1;
        correct += pred[i] == g[i];
      }
      if (pred != g) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const int gp = i > 0 ? g[i - 1] : -1;
          const int pp = i > 0 ? pred[i - 1] : -1;
          if (pred[i] != g[i]) {
            for (const std::string& f : features[e][i]) {
              perceptron.UpdateEmission(f, g[i], 1.0);
              perceptron.UpdateEmission(f, pred[i], -1.0);
            }
          }
          if (gp != pp || g[i] != pred[i]) {
            perceptron.UpdateTransition(gp, g[i], 1.0);
            perceptron.UpdateTransition(pp, pred[i], -1.0);
          }
        }
      }
      perceptron.Tick();
    }
    if (options.progress) {
      options.progress(epoch + 1,
                       total ? static_cast<double>(correct) / total : 1.0);
    }
  }
  return perceptron.Averaged();
}

std::vector<std::string> Tag(const LinearModel& model,
                             const brown::PathTable* clusters,
                             std::span<const std::string> forms) {
  if (forms.empty()) throw Error(Errc::kEmptyInput, "empty sentence");
  std::vector<FeatureVector> features;
  features.reserve(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    features.push_back(ExtractFeatures(forms, i, clusters));
  }
  std::vector<std::string> labels;
  for (int y : Viterbi(model, features)) {
    labels.push_back(model.tags().label(y));
  }
  return labels;
}

}  // namespace dantools

namespace dantools {

void MorphLexicon::Add(const std::string& form, const std::string& upos,
                       const std::string& lemma, const std::string& feats,
                       std::int64_t count) {
  counts_[{form, upos}][{lemma, feats}] += count;
  const std::string lower = utf8::Lower(form);
  folded_[{lower, upos}][{lemma, feats}] += count;
  lemmas_[lower][lemma] += count;
}

MorphLexicon MorphLexicon::Build(const std::vector<ConlluSentence>& sentences) {
  MorphLexicon lex;
  for (const ConlluSentence& s : sentences) {
    for (const ConlluToken& t : s.tokens) {
      if (t.upos == "_" || t.lemma == "_") continue;
      lex.Add(t.form, t.upos, t.lemma, t.feats);
    }
  }
  return lex;
}

// Ties between equally frequent analyses go to the smallest (lemma, feats).
std::optional<MorphLexicon::Analysis> MorphLexicon::Best(
    const std::map<Key, Tally>& table, const Key& key) {
  const auto it = table.find(key);
  if (it == table.end()) return std::nullopt;
  const std::pair<std::string, std::string>* best = nullptr;
  std::int64_t top = 0;
  for (const auto& [analysis, n] : it->second) {
    if (best == nullptr || n > top) {
      best = &analysis;
      top = n;
    }
  }
  return Analysis{best->first, best->second};
}

MorphLexicon::Analysis MorphLexicon::Lookup(const std::string& form,
                                            const std::string& upos) const {
  if (auto a = Best(counts_, {form, upos})) return *a;
  const std::string lower = utf8::Lower(form);
  if (auto a = Best(folded_, {lower, upos})) return *a;
  if (const auto it = lemmas_.find(lower); it != lemmas_.end()) {
    const std::string* best = nullptr;
    std::int64_t top = 0;
    for (const auto& [lemma, n] : it->second) {
      if (best == nullptr || n > top) {
        best = &lemma;
        top = n;
      }
    }
    return {*best, "_"};
  }
  return {lower, "_"};
}

void MorphLexicon::Write(std::ostream& out) const {
  for (const auto& [key, tally] : counts_) {
    for (const auto& [analysis, n] : tally) {
      out << key.first << '\t' << key.second << '\t' << analysis.first << '\t'
          << analysis.second << '\t' << n << '\n';
    }
  }
}

MorphLexicon MorphLexicon::Read(std::istream& in) {
  MorphLexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = SplitTabs(line);
    if (f.size() != 5) {
      throw Error(Errc::kBadLine, "expected form<TAB>upos<TAB>lemma<TAB>feats<TAB>count",
                  line_no);
    }
    for (std::size_t k = 0; k < 4; ++k) {
      if (f[k].empty()) throw Error(Errc::kBadLine, "empty field", line_no);
    }
    std::int64_t n = 0;
    const auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), n);
    if (ec != std::errc() || ptr != f[4].data() + f[4].size() || n <= 0) {
      throw Error(Errc::kBadLine, "bad count", line_no);
    }
    lex.Add(std::string(f[0]), std::string(f[1]), std::string(f[2]),
            std::string(f[3]), n);
  }
  return lex;
}

MorphLexicon MorphLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read lexicon " + path);
  return Read(in);
}

}  // namespace dantools
