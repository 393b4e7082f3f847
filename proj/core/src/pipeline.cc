#include "snapkit/pipeline.h"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "snapkit/diff_engine.h"
#include "snapkit/errors.h"
#include "snapkit/kg_categorizer.h"
#include "snapkit/parallel.h"
#include "snapkit/textseg.h"

namespace snapkit {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size()) {
    throw ValidationError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

double ParseFraction(std::string_view key, std::string_view value) {
  // from_chars for double is unavailable on older libstdc++; strtod is exact enough.
  std::string copy(value);
  char *end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(v)) {
    throw ValidationError("bad value for " + std::string(key) + ": '" + copy + "'");
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ValidationError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream OpenInput(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// Runs `fn`, prefixing any library error with the file it concerns.
template <typename Fn>
auto WithFile(const fs::path &path, Fn &&fn) {
  try {
    return fn();
  } catch (const InputError &) {
    throw;
  } catch (const Error &e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// Output files are written under <output_dir>/.staging and renamed into the
// output directory only by Commit(), so final paths never hold partial data.
class Staging {
 public:
  explicit Staging(fs::path output_dir)
      : output_dir_(std::move(output_dir)), dir_(output_dir_ / kStagingDir) {
    fs::create_directories(output_dir_);
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path Path(std::string_view name) const { return dir_ / name; }

  void Write(std::string_view name, std::string_view contents) {
    std::ofstream out(Path(name), std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) throw IoError("cannot write " + Path(name).string());
    Track(name);
  }

  template <typename Range>
  std::size_t WriteRecordsTo(std::string_view name, const Range &records) {
    std::ofstream out(Path(name), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + Path(name).string());
    const std::size_t n = WriteRecords(records, out);
    out.close();
    if (!out) throw IoError("cannot write " + Path(name).string());
    Track(name);
    return n;
  }

  const std::vector<std::string> &files() const { return files_; }

  void Commit() {
    for (const std::string &name : files_) {
      if (name == kManifestFile) continue;
      fs::rename(dir_ / name, output_dir_ / name);
    }
    // The manifest goes last: its presence marks a complete directory.
    if (std::find(files_.begin(), files_.end(), kManifestFile) != files_.end()) {
      fs::rename(dir_ / kManifestFile, output_dir_ / kManifestFile);
    }
    fs::remove_all(dir_);
  }

 private:
  void Track(std::string_view name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) {
      files_.emplace_back(name);
    }
  }

  fs::path output_dir_;
  fs::path dir_;
  std::vector<std::string> files_;
};

void WriteManifest(const PipelineConfig &config, std::string_view stages, Staging *staging) {
  std::string m = "snapkit-manifest\t1\n";
  m.append("stages\t").append(stages).append("\n");
  m.append("seed\t").append(std::to_string(config.seed)).append("\n");
  m.append("config_sha256\t").append(Sha256Hex(CanonicalSettings(config))).append("\n");
  const std::pair<std::string_view, const fs::path *> inputs[] = {
      {"prev_articles", &config.prev_articles},   {"recent_articles", &config.recent_articles},
      {"prev_triples", &config.prev_triples},     {"recent_triples", &config.recent_triples},
      {"mapping", &config.mapping},               {"diffset", &config.diffset},
      {"entity_types", &config.entity_types},
  };
  for (const auto &[role, path] : inputs) {
    if (path->empty() || !fs::exists(*path)) continue;
    m.append("input\t").append(role).append("\t").append(Sha256File(*path)).append("\n");
  }
  for (const std::string &name : staging->files()) {
    if (name == kManifestFile) continue;
    m.append("output\t").append(name).append("\t");
    m.append(Sha256File(staging->Path(name))).append("\n");
  }
  staging->Write(kManifestFile, m);
}

QcOptions MakeQcOptions(const PipelineConfig &config) {
  QcOptions options;
  options.case_insensitive = config.case_insensitive;
  options.caps = config.caps;
  options.workers = config.EffectiveWorkers();
  return options;
}

DiffOptions MakeDiffOptions(const PipelineConfig &config) {
  DiffOptions options;
  options.workers = config.EffectiveWorkers();
  options.strip_markup = config.strip_markup;
  return options;
}

// Attributes reader errors to the file being read.
class FileArticleReader : public ArticleReader {
 public:
  FileArticleReader(const fs::path &path, ArticleFormat format, std::string tag)
      : path_(path), in_(OpenInput(path)), reader_(OpenArticleReader(in_, format, std::move(tag))) {}

  std::optional<ArticleSnapshot> Next() override {
    return WithFile(path_, [&] { return reader_->Next(); });
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::unique_ptr<ArticleReader> reader_;
};

std::vector<DiffsetEntry> ComputeDiffset(const PipelineConfig &config) {
  FileArticleReader prev(config.prev_articles, config.article_format, config.prev_tag);
  FileArticleReader recent(config.recent_articles, config.article_format, config.recent_tag);
  return BuildDiffset(prev, recent, config.pair(), MakeDiffOptions(config));
}

DiffsetRun DiffsetStage(const PipelineConfig &config, Staging *staging) {
  DiffsetRun run;
  run.entries = ComputeDiffset(config);
  run.stats = ComputeCorpusStats(run.entries, "diffset " + config.pair().Label());
  staging->WriteRecordsTo(kDiffsetFile, run.entries);
  staging->Write(kDiffsetStatsFile, RenderCorpusStatsTsv(std::span(&run.stats, 1)));
  return run;
}

std::vector<DiffsetEntry> LoadDiffset(const fs::path &path, const SnapshotPair &pair) {
  auto in = OpenInput(path);
  return WithFile(path, [&] { return ReadDiffset(in, pair); });
}

std::vector<FactTriple> LoadTriples(const fs::path &path, TripleFormat format,
                                    const std::string &tag) {
  auto in = OpenInput(path);
  return WithFile(path, [&] { return ReadTriples(in, format, tag); });
}

ProbesRun ProbesStage(const PipelineConfig &config, const std::vector<DiffsetEntry> *diffset,
                      Staging *staging) {
  std::vector<DiffsetEntry> loaded;
  if (diffset == nullptr) {
    const fs::path existing = config.output_dir / kDiffsetFile;
    if (!config.diffset.empty()) {
      loaded = LoadDiffset(config.diffset, config.pair());
    } else if (fs::exists(existing)) {
      loaded = LoadDiffset(existing, config.pair());
    } else {
      loaded = ComputeDiffset(config);
    }
    diffset = &loaded;
  }

  EntityMapping mapping = [&] {
    auto in = OpenInput(config.mapping);
    return WithFile(config.mapping, [&] { return ReadMapping(in); });
  }();

  auto prev = LoadTriples(config.prev_triples, config.triple_format, config.prev_tag);
  auto recent = LoadTriples(config.recent_triples, config.triple_format, config.recent_tag);
  auto categorized = Categorize(std::move(prev), std::move(recent), config.EffectiveWorkers());
  const StageCounts initial = CountByCategory(categorized);
  auto sampled = SampleUnchanged(std::move(categorized), config.sample_rate, config.seed);

  // Only articles that an Unchanged fact can align with are kept in memory.
  std::unordered_set<std::string> needed;
  for (const CategorizedFact &f : sampled) {
    if (f.category != Category::kUnchanged) continue;
    if (const MappingEntry *e = mapping.FindByEntity(f.triple.subject_id)) {
      needed.insert(e->article_id);
    }
  }
  ArticleTextIndex full_recent;
  if (!needed.empty()) {
    auto in = OpenInput(config.recent_articles);
    WithFile(config.recent_articles, [&] {
      auto reader = OpenArticleReader(in, config.article_format, config.recent_tag);
      while (auto a = reader->Next()) {
        if (needed.contains(a->article_id)) {
          full_recent.Add(a->article_id, PrepareText(a->text, config.strip_markup));
        }
      }
      return 0;
    });
  }
  const ArticleTextIndex diff_index = ArticleTextIndex::FromDiffset(*diffset);

  QcResult qc = AlignAndFilter(std::move(sampled), mapping, diff_index, full_recent,
                               MakeQcOptions(config));
  qc.report.categorized = initial;

  staging->WriteRecordsTo(kProbesFile, qc.probes);
  staging->Write(kFunnelFile, RenderFunnelTsv(qc.report));
  staging->Write(kFunnelTextFile, RenderFunnel(qc.report));
  return {std::move(qc.probes), qc.report};
}

CorpusStats SnapshotStats(const fs::path &path, ArticleFormat format, const std::string &tag) {
  CorpusStats stats{"snapshot " + tag};
  auto in = OpenInput(path);
  WithFile(path, [&] {
    auto reader = OpenArticleReader(in, format, tag);
    while (auto a = reader->Next()) stats.Add(a->text);
    return 0;
  });
  return stats;
}

void StatsStage(const PipelineConfig &config, const fs::path &diffset_path,
                const fs::path &probes_path, Staging *staging) {
  std::vector<CorpusStats> corpus;
  if (!config.prev_articles.empty() && fs::exists(config.prev_articles)) {
    corpus.push_back(SnapshotStats(config.prev_articles, config.article_format, config.prev_tag));
  }
  if (fs::exists(diffset_path)) {
    auto entries = LoadDiffset(diffset_path, config.pair());
    corpus.push_back(ComputeCorpusStats(entries, "diffset " + config.pair().Label()));
  }
  if (!config.recent_articles.empty() && fs::exists(config.recent_articles)) {
    corpus.push_back(
        SnapshotStats(config.recent_articles, config.article_format, config.recent_tag));
  }

  std::vector<ProbeInstance> probes;
  if (fs::exists(probes_path)) {
    auto in = OpenInput(probes_path);
    probes = WithFile(probes_path, [&] { return ReadProbes(in); });
  }
  std::optional<TypeMapping> types;
  if (!config.entity_types.empty()) {
    auto in = OpenInput(config.entity_types);
    types = WithFile(config.entity_types, [&] { return ReadTypeMapping(in); });
  }

  std::string tsv;
  std::string text = RenderCorpusStats(corpus);
  for (const CorpusStats &s : corpus) {
    tsv.append("corpus\t");
    tsv.append(RenderCorpusStatsTsv(std::span(&s, 1)));
  }
  for (DistributionKey key : {DistributionKey::kRelation, DistributionKey::kSubjectEntity,
                              DistributionKey::kObjectEntity}) {
    const TypeMapping *t = key == DistributionKey::kRelation || !types ? nullptr : &*types;
    for (Category c : {Category::kUnchanged, Category::kChanged}) {
      std::vector<ProbeInstance> subset;
      for (const ProbeInstance &p : probes) {
        if (p.category == c) subset.push_back(p);
      }
      if (subset.empty()) continue;
      auto report = Distribution(subset, key, config.top_k, t);
      std::string rows = RenderDistributionTsv(report);
      // Prefix every row with the category.
      std::istringstream lines(rows);
      for (std::string line; std::getline(lines, line);) {
        tsv.append(ToString(c)).append("\t").append(line).append("\n");
      }
      text.append("\n[").append(ToString(c)).append("] ").append(RenderDistribution(report));
    }
  }
  staging->Write(kStatsFile, tsv);
  staging->Write(kStatsTextFile, text);
}

bool OutputsComplete(const fs::path &dir) {
  for (auto name : {kManifestFile, kDiffsetFile, kDiffsetStatsFile, kProbesFile, kFunnelFile,
                    kFunnelTextFile, kStatsFile, kStatsTextFile}) {
    if (!fs::exists(dir / name)) return false;
  }
  std::ifstream manifest(dir / kManifestFile);
  std::string line;
  while (std::getline(manifest, line)) {
    if (line == "stages\tall") return true;
  }
  return false;
}

void RequirePath(const fs::path &path, std::string_view what) {
  if (path.empty()) throw ValidationError(std::string(what) + " is not set");
  if (!fs::exists(path)) {
    throw ValidationError(std::string(what) + " does not exist: " + path.string());
  }
}

}  // namespace

int PipelineConfig::EffectiveWorkers() const {
  return workers > 0 ? workers : DefaultWorkerCount();
}

void ApplySetting(PipelineConfig *c, std::string_view key, std::string_view value) {
  value = Trim(value);
  if (key == "prev_articles") c->prev_articles = value;
  else if (key == "recent_articles") c->recent_articles = value;
  else if (key == "prev_triples") c->prev_triples = value;
  else if (key == "recent_triples") c->recent_triples = value;
  else if (key == "mapping") c->mapping = value;
  else if (key == "diffset") c->diffset = value;
  else if (key == "entity_types") c->entity_types = value;
  else if (key == "output_dir") c->output_dir = value;
  else if (key == "prev_tag") c->prev_tag = value;
  else if (key == "recent_tag") c->recent_tag = value;
  else if (key == "article_format") {
    auto f = ParseArticleFormat(value);
    if (!f) throw ValidationError("unknown article_format '" + std::string(value) + "'");
    c->article_format = *f;
  } else if (key == "triple_format") {
    auto f = ParseTripleFormat(value);
    if (!f) throw ValidationError("unknown triple_format '" + std::string(value) + "'");
    c->triple_format = *f;
  } else if (key == "seed") c->seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "sample_rate") c->sample_rate = ParseFraction(key, value);
  else if (key == "subject_cap") c->caps.subject = ParseFraction(key, value);
  else if (key == "object_cap") c->caps.object = ParseFraction(key, value);
  else if (key == "relation_cap") c->caps.relation = ParseFraction(key, value);
  else if (key == "workers") c->workers = ParseNumber<int>(key, value);
  else if (key == "top_k") c->top_k = ParseNumber<std::size_t>(key, value);
  else if (key == "case_insensitive") c->case_insensitive = ParseBool(key, value);
  else if (key == "strip_markup") c->strip_markup = ParseBool(key, value);
  else if (key == "force") c->force = ParseBool(key, value);
  else throw ValidationError("unknown setting '" + std::string(key) + "'");
}

void LoadConfig(std::istream &in, PipelineConfig *config, const fs::path &base_dir) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = Trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key(Trim(view.substr(0, eq)));
    ApplySetting(config, key, view.substr(eq + 1));
  }
  if (base_dir.empty()) return;
  for (fs::path *p : {&config->prev_articles, &config->recent_articles, &config->prev_triples,
                      &config->recent_triples, &config->mapping, &config->diffset,
                      &config->entity_types, &config->output_dir}) {
    if (!p->empty() && p->is_relative()) *p = base_dir / *p;
  }
}

void LoadConfigFile(const fs::path &path, PipelineConfig *config) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  LoadConfig(in, config, path.parent_path());
}

std::string CanonicalSettings(const PipelineConfig &c) {
  std::string s;
  auto add = [&](std::string_view k, const std::string &v) {
    s.append(k).append("=").append(v).append("\n");
  };
  add("article_format", c.article_format == ArticleFormat::kXmlDump ? "xml-dump" : "article-records");
  add("triple_format", c.triple_format == TripleFormat::kTsv ? "tsv" : "json-records");
  add("prev_tag", c.prev_tag);
  add("recent_tag", c.recent_tag);
  add("seed", std::to_string(c.seed));
  add("sample_rate", FormatDouble(c.sample_rate));
  add("subject_cap", FormatDouble(c.caps.subject));
  add("object_cap", FormatDouble(c.caps.object));
  add("relation_cap", FormatDouble(c.caps.relation));
  add("case_insensitive", c.case_insensitive ? "true" : "false");
  add("strip_markup", c.strip_markup ? "true" : "false");
  add("top_k", std::to_string(c.top_k));
  return s;
}

void ValidateConfig(const PipelineConfig &config, Stage stage) {
  config.pair().Validate();
  if (!(config.sample_rate > 0.0 && config.sample_rate <= 1.0)) {
    throw ValidationError("sample_rate must lie in (0, 1]");
  }
  for (double cap : {config.caps.subject, config.caps.object, config.caps.relation}) {
    if (!(cap > 0.0 && cap <= 1.0)) throw ValidationError("cap fractions must lie in (0, 1]");
  }
  if (config.workers < 0) throw ValidationError("workers must be >= 1 (0 = auto)");
  if (config.top_k == 0) throw ValidationError("top_k must be >= 1");
  if (config.output_dir.empty()) throw ValidationError("output_dir is not set");

  const bool diffset = stage == Stage::kDiffset || stage == Stage::kAll;
  const bool probes = stage == Stage::kProbes || stage == Stage::kAll;
  if (diffset) {
    RequirePath(config.prev_articles, "prev_articles");
    RequirePath(config.recent_articles, "recent_articles");
  }
  if (probes) {
    RequirePath(config.prev_triples, "prev_triples");
    RequirePath(config.recent_triples, "recent_triples");
    RequirePath(config.mapping, "mapping");
    RequirePath(config.recent_articles, "recent_articles");
    if (!config.diffset.empty()) RequirePath(config.diffset, "diffset");
    if (stage == Stage::kProbes && config.diffset.empty() &&
        !fs::exists(config.output_dir / kDiffsetFile)) {
      RequirePath(config.prev_articles, "prev_articles");
    }
  }
  if (!config.entity_types.empty()) RequirePath(config.entity_types, "entity_types");
}

DiffsetRun RunDiffset(const PipelineConfig &config) {
  ValidateConfig(config, Stage::kDiffset);
  Staging staging(config.output_dir);
  DiffsetRun run = DiffsetStage(config, &staging);
  WriteManifest(config, "diffset", &staging);
  staging.Commit();
  return run;
}

ProbesRun RunProbes(const PipelineConfig &config) {
  ValidateConfig(config, Stage::kProbes);
  Staging staging(config.output_dir);
  ProbesRun run = ProbesStage(config, nullptr, &staging);
  WriteManifest(config, "probes", &staging);
  staging.Commit();
  return run;
}

void RunStats(const PipelineConfig &config) {
  ValidateConfig(config, Stage::kStats);
  Staging staging(config.output_dir);
  StatsStage(config, config.diffset.empty() ? config.output_dir / kDiffsetFile : config.diffset,
             config.output_dir / kProbesFile, &staging);
  WriteManifest(config, "stats", &staging);
  staging.Commit();
}

RunSummary RunAll(const PipelineConfig &config, std::ostream *log) {
  ValidateConfig(config, Stage::kAll);
  RunSummary summary;
  if (!config.force && OutputsComplete(config.output_dir)) {
    if (log != nullptr) {
      *log << "outputs in " << config.output_dir.string()
           << " are complete; nothing to do (use --force to rebuild)\n";
    }
    summary.skipped = true;
    return summary;
  }
  Staging staging(config.output_dir);
  summary.diffset = DiffsetStage(config, &staging);
  summary.probes = ProbesStage(config, &summary.diffset->entries, &staging);
  StatsStage(config, staging.Path(kDiffsetFile), staging.Path(kProbesFile), &staging);
  WriteManifest(config, "all", &staging);
  staging.Commit();
  return summary;
}

std::string Sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string Sha256File(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 init failed");
  }
  std::vector<char> buffer(1 << 20);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace snapkit
