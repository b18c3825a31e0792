#include "dantools/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dantools/brown.h"
#include "dantools/conllu.h"
#include "dantools/depparse.h"
#include "dantools/error.h"
#include "dantools/seqtag.h"
#include "dantools/textseg.h"

namespace dantools::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string ReadInput(const std::string& path, std::istream& in) {
  std::ostringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot read " + path);
  ss << file.rdbuf();
  return ss.str();
}

void WriteOutput(const std::string& path, const std::string& payload,
                 std::ostream& out) {
  if (path.empty() || path == "-") {
    out << payload;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!(file << payload) || !file.flush()) {
    throw DataError("cannot write " + path);
  }
}

// Missing configuration is a usage problem; a file that exists but does
// not load is a data problem.
const std::string& RequireFile(const std::string& key, const std::string& path) {
  if (path.empty()) throw UsageError(key + " is not set");
  if (!fs::is_regular_file(path)) {
    throw UsageError("no such file for " + key + ": " + path);
  }
  return path;
}

Tokenizer MakeTokenizer(const PipelineConfig& config) {
  if (config.abbreviations.empty()) return Tokenizer();
  return Tokenizer(Abbreviations::Load(RequireFile("abbreviations", config.abbreviations)));
}

std::optional<brown::PathTable> MaybeClusters(const PipelineConfig& config) {
  if (config.clusters.empty()) return std::nullopt;
  return brown::LoadPaths(RequireFile("clusters", config.clusters));
}

LinearModel LoadModel(const std::string& key, const std::string& path,
                      bool transition) {
  LinearModel m = LinearModel::Load(RequireFile(key, path));
  if ((m.tags().scheme() == Scheme::kTransition) != transition) {
    throw Error(Errc::kBadModel, path + " holds the wrong kind of model");
  }
  return m;
}

void Merge(PipelineConfig& base, const PipelineConfig& flags) {
  auto over = [](std::string& a, const std::string& b) {
    if (!b.empty()) a = b;
  };
  over(base.abbreviations, flags.abbreviations);
  over(base.clusters, flags.clusters);
  over(base.ner_model, flags.ner_model);
  over(base.pos_model, flags.pos_model);
  over(base.parser_model, flags.parser_model);
  over(base.lexicon, flags.lexicon);
  over(base.stages, flags.stages);
}

PipelineConfig Resolve(const std::string& config_path, const PipelineConfig& flags) {
  PipelineConfig config;
  if (!config_path.empty()) {
    if (!fs::is_regular_file(config_path)) {
      throw UsageError("no such config file: " + config_path);
    }
    config = ReadConfig(config_path);
  }
  PipelineConfig f = flags;
  if (f.stages == PipelineConfig{}.stages) f.stages.clear();
  Merge(config, f);
  return config;
}

std::string Normalize(std::string text) {
  if (!text.empty() && text.back() != '\n') text += '\n';
  return text;
}

std::vector<std::string> Forms(const SentenceSpan& s) {
  std::vector<std::string> forms;
  forms.reserve(s.tokens.size());
  for (const TokenSpan& t : s.tokens) forms.push_back(t.form);
  return forms;
}

int CmdNer(const std::string& input, const PipelineConfig& config,
           const std::string& output, std::istream& in, std::ostream& out) {
  const Tokenizer tokenizer = MakeTokenizer(config);
  const LinearModel model = LoadModel("ner_model", config.ner_model, false);
  const auto clusters = MaybeClusters(config);
  const std::string text = ReadInput(input, in);
  std::string payload;
  for (const SentenceSpan& s : tokenizer.Tokenize(text)) {
    const std::vector<std::string> forms = Forms(s);
    const std::vector<std::string> tags =
        Tag(model, clusters ? &*clusters : nullptr, forms);
    SlashedSentence line;
    for (std::size_t i = 0; i < forms.size(); ++i) line.pairs.emplace_back(forms[i], tags[i]);
    payload += EmitSlashed(line);
    payload += '\n';
  }
  WriteOutput(output, payload, out);
  return kExitOk;
}

int CmdPipe(const std::string& input, const PipelineConfig& config,
            const std::string& output, std::istream& in, std::ostream& out) {
  std::set<std::string> stages;
  for (const std::string& s : SplitCsv(config.stages)) {
    if (s != "tokenize" && s != "pos" && s != "lemma" && s != "parse") {
      throw UsageError("unknown stage " + s);
    }
    stages.insert(s);
  }
  if (!stages.count("tokenize")) throw UsageError("stage tokenize is required");
  if ((stages.count("lemma") || stages.count("parse")) && !stages.count("pos")) {
    throw UsageError("stages lemma and parse require pos");
  }
  const Tokenizer tokenizer = MakeTokenizer(config);
  const auto clusters = MaybeClusters(config);
  const brown::PathTable* cp = clusters ? &*clusters : nullptr;
  std::optional<LinearModel> pos, parser;
  std::optional<MorphLexicon> lexicon;
  if (stages.count("pos")) pos = LoadModel("pos_model", config.pos_model, false);
  if (stages.count("lemma")) lexicon = MorphLexicon::Load(RequireFile("lexicon", config.lexicon));
  if (stages.count("parse")) {
    parser = LoadModel("parser_model", config.parser_model, true);
  }

  const std::string text = Normalize(ReadInput(input, in));
  std::ostringstream payload;
  for (const SentenceSpan& span : tokenizer.Tokenize(text)) {
    ConlluSentence s = FromSpans(span);
    const std::vector<std::string> forms = Forms(span);
    if (pos) {
      const std::vector<std::string> tags = Tag(*pos, cp, forms);
      for (std::size_t i = 0; i < tags.size(); ++i) s.tokens[i].upos = tags[i];
    }
    if (lexicon) {
      for (ConlluToken& t : s.tokens) {
        const MorphLexicon::Analysis a = lexicon->Lookup(t.form, t.upos);
        t.lemma = a.lemma;
        t.feats = a.feats;
      }
    }
    if (parser) {
      depparse::ParseInput pin{forms, {}};
      for (const ConlluToken& t : s.tokens) pin.upos.push_back(t.upos);
      depparse::AssignTree(depparse::Parse(*parser, pin), s);
    }
    WriteConllu(payload, s);
  }
  WriteOutput(output, payload.str(), out);
  return kExitOk;
}

std::vector<int> ParseSizes(const std::string& csv) {
  std::vector<int> sizes;
  for (const std::string& item : SplitCsv(csv)) {
    int v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size() || v < 1) {
      throw UsageError("bad cluster size " + item);
    }
    sizes.push_back(v);
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

int CmdCluster(const std::string& input, int window, const std::string& sizes_csv,
               const std::string& prefix, std::int64_t min_count,
               std::istream& in, std::ostream& err) {
  if (window < 2) throw UsageError("--window must be at least 2");
  const std::vector<int> sizes = ParseSizes(sizes_csv);
  if (prefix.empty() || prefix == "-") throw UsageError("--output prefix is required");

  brown::BigramStats stats;
  if (input == "-") {
    stats = brown::CountBigrams(in, min_count);
  } else {
    std::ifstream file(input, std::ios::binary);
    if (!file) throw DataError("cannot read " + input);
    stats = brown::CountBigrams(file, min_count);
  }
  const int vocab = static_cast<int>(stats.vocab.size());
  for (int size : sizes) {
    if (size > vocab) {
      throw UsageError("cluster size " + std::to_string(size) +
                       " exceeds the vocabulary size " + std::to_string(vocab));
    }
  }
  err << "vocabulary " << vocab << ", tokens " << stats.total_tokens << '\n';
  const brown::MergeHistory history = brown::RunClustering(stats, window);
  for (int size : sizes) {
    std::ostringstream ss;
    brown::WritePaths(ss, brown::Cut(history, size));
    const std::string path = prefix + "-" + std::to_string(size) + ".paths";
    WriteOutput(path, ss.str(), std::cout);
    err << "wrote " << path << '\n';
  }
  return kExitOk;
}

bool LooksLikeConllu(const std::string& text) {
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    if (Trim(line).empty()) continue;
    return line[0] == '#' || line.find('\t') != std::string::npos;
  }
  return false;
}

std::vector<TaggedSentence> NerExamples(const std::string& text) {
  std::vector<TaggedSentence> out;
  if (LooksLikeConllu(text)) {
    for (const ConlluSentence& s : ParseConllu(text)) {
      TaggedSentence t;
      for (const ConlluToken& tok : s.tokens) {
        t.forms.push_back(tok.form);
        t.labels.push_back(MiscValue(tok.misc, "NE").value_or("O"));
      }
      out.push_back(std::move(t));
    }
    return out;
  }
  std::istringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    SlashedSentence s;
    try {
      s = ParseSlashed(line);
    } catch (const Error& e) {
      throw Error(e.code(), "malformed slashed-tag line", line_no);
    }
    TaggedSentence t;
    for (auto& [form, tag] : s.pairs) {
      t.forms.push_back(std::move(form));
      t.labels.push_back(std::move(tag));
    }
    out.push_back(std::move(t));
  }
  return out;
}

// Ner() when only PER, LOC and ORG occur; otherwise extra types are
// appended in sorted order.
TagSet NerTags(const std::vector<TaggedSentence>& examples) {
  std::vector<std::string> types = {"PER", "LOC", "ORG"};
  std::set<std::string> extra;
  for (const auto& ex : examples) {
    for (const std::string& l : ex.labels) {
      if (l.size() > 2 && (l[0] == 'B' || l[0] == 'I') && l[1] == '-') {
        const std::string t = l.substr(2);
        if (std::find(types.begin(), types.end(), t) == types.end()) extra.insert(t);
      }
    }
  }
  if (extra.empty()) return TagSet::Ner();
  types.insert(types.end(), extra.begin(), extra.end());
  return TagSet::Bio(types);
}

std::vector<TaggedSentence> UposExamples(const std::vector<ConlluSentence>& sentences) {
  std::vector<TaggedSentence> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    TaggedSentence t;
    for (const ConlluToken& tok : sentences[s].tokens) {
      if (tok.upos == "_") {
        throw Error(Errc::kInvalidGold, "sentence " + std::to_string(s + 1) +
                                            ": token " + std::to_string(tok.id) +
                                            " has no UPOS");
      }
      t.forms.push_back(tok.form);
      t.labels.push_back(tok.upos);
    }
    out.push_back(std::move(t));
  }
  return out;
}

int CmdTrain(const std::string& task, const std::string& input,
             const PipelineConfig& config, const std::string& output,
             const TrainOptions& base, std::istream& in, std::ostream& out,
             std::ostream& err) {
  if (task != "ner" && task != "pos" && task != "parse") {
    throw UsageError("unknown training task " + task);
  }
  if (output.empty()) throw UsageError("--output is required");
  const auto clusters = MaybeClusters(config);
  const brown::PathTable* cp = clusters ? &*clusters : nullptr;
  TrainOptions options = base;
  options.progress = [&err](int epoch, double accuracy) {
    err << "epoch " << epoch << " accuracy " << std::fixed << std::setprecision(4)
        << accuracy << '\n';
  };
  const std::string text = ReadInput(input, in);

  LinearModel model;
  if (task == "ner") {
    const auto examples = NerExamples(text);
    model = TrainTagger(examples, NerTags(examples), cp, options);
  } else {
    const std::vector<ConlluSentence> sentences = ParseConllu(text);
    if (task == "pos") {
      model = TrainTagger(UposExamples(sentences), TagSet::Upos(), cp, options);
      if (!config.lexicon.empty()) {
        std::ostringstream lex;
        MorphLexicon::Build(sentences).Write(lex);
        WriteOutput(config.lexicon, lex.str(), out);
      }
    } else {
      model = depparse::TrainParser(depparse::ExamplesFromConllu(sentences), options);
    }
  }
  std::ostringstream ss;
  model.Write(ss);
  WriteOutput(output, ss.str(), out);
  return kExitOk;
}

}  // namespace

PipelineConfig ReadConfig(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot read " + path);
  const fs::path dir = fs::path(path).parent_path();
  PipelineConfig c;
  int line_no = 0;
  for (std::string line; std::getline(file, line);) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = Trim(std::string_view(t).substr(0, eq));
    std::string value = Trim(std::string_view(t).substr(eq + 1));
    if (key == "stages") {
      c.stages = value;
      continue;
    }
    if (!value.empty() && fs::path(value).is_relative()) value = (dir / value).string();
    if (key == "abbreviations") c.abbreviations = value;
    else if (key == "clusters") c.clusters = value;
    else if (key == "ner_model") c.ner_model = value;
    else if (key == "pos_model") c.pos_model = value;
    else if (key == "parser_model") c.parser_model = value;
    else if (key == "lexicon") c.lexicon = value;
    else {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": unknown key " + key);
    }
  }
  return c;
}

int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Danish tokenization, NER, tagging, parsing and word clustering",
               "dantools"};
  app.require_subcommand(1);

  std::string input = "-", output, config_path, task;
  PipelineConfig flags;
  int window = 0, epochs = 10;
  std::uint64_t seed = 1;
  std::int64_t min_count = 10;
  std::string sizes;

  auto* ner = app.add_subcommand("ner", "tag raw text with named entities (slashed-tag output)");
  ner->add_option("input", input, "text file, or - for standard input");
  ner->add_option("--config", config_path, "key = value configuration file");
  ner->add_option("--model", flags.ner_model, "NER model");
  ner->add_option("--clusters", flags.clusters, "cluster paths file");
  ner->add_option("--abbreviations", flags.abbreviations, "abbreviation list");
  ner->add_option("--output", output, "output file (default standard output)");

  auto* pipe = app.add_subcommand("pipe", "tokenize, tag, lemmatize and parse raw text (CoNLL-U output)");
  pipe->add_option("input", input, "text file, or - for standard input");
  pipe->add_option("--config", config_path, "key = value configuration file");
  pipe->add_option("--pos-model", flags.pos_model, "POS model");
  pipe->add_option("--parser-model", flags.parser_model, "parser model");
  pipe->add_option("--lexicon", flags.lexicon, "morphological lexicon");
  pipe->add_option("--clusters", flags.clusters, "cluster paths file");
  pipe->add_option("--abbreviations", flags.abbreviations, "abbreviation list");
  pipe->add_option("--stages", flags.stages, "comma-separated subset of tokenize,pos,lemma,parse");
  pipe->add_option("--output", output, "output file (default standard output)");

  auto* cluster = app.add_subcommand("cluster", "induce Brown clusters, one paths file per size");
  cluster->add_option("corpus", input, "one sentence per line, tokens separated by spaces");
  cluster->add_option("--window", window, "active cluster window")->required();
  cluster->add_option("--sizes", sizes, "comma-separated cluster counts")->required();
  cluster->add_option("--output", output, "output prefix; writes <prefix>-<size>.paths")->required();
  cluster->add_option("--min-count", min_count, "rarer words become <unk>")->capture_default_str();

  auto* train = app.add_subcommand("train", "train a model: ner, pos or parse");
  train->add_option("task", task, "ner, pos or parse")->required();
  train->add_option("input", input, "training file, or - for standard input");
  train->add_option("--config", config_path, "key = value configuration file");
  train->add_option("--output", output, "model file to write")->required();
  train->add_option("--epochs", epochs, "training epochs")->capture_default_str();
  train->add_option("--seed", seed, "shuffling seed")->capture_default_str();
  train->add_option("--clusters", flags.clusters, "cluster paths file");
  train->add_option("--lexicon", flags.lexicon, "pos only: also write a lexicon here");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (epochs < 0) throw UsageError("--epochs must not be negative");
    if (min_count < 1) throw UsageError("--min-count must be positive");
    if (ner->parsed()) return CmdNer(input, Resolve(config_path, flags), output, in, out);
    if (pipe->parsed()) return CmdPipe(input, Resolve(config_path, flags), output, in, out);
    if (cluster->parsed()) {
      return CmdCluster(input, window, sizes, output, min_count, in, err);
    }
    TrainOptions options;
    options.epochs = epochs;
    options.seed = seed;
    return CmdTrain(task, input, Resolve(config_path, flags), output, options, in,
                    out, err);
  } catch (const UsageError& e) {
    err << "dantools: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "dantools: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dantools: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace dantools::cli
