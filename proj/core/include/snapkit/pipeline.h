#ifndef SNAPKIT_PIPELINE_H_
#define SNAPKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "snapkit/ingest.h"
#include "snapkit/probe_qc.h"
#include "snapkit/stats_report.h"
#include "snapkit/types.h"

namespace snapkit {

namespace fs = std::filesystem;

// Output file names inside the output directory.
inline constexpr std::string_view kDiffsetFile = "diffset.tsv";
inline constexpr std::string_view kDiffsetStatsFile = "diffset_stats.tsv";
inline constexpr std::string_view kProbesFile = "probes.tsv";
inline constexpr std::string_view kFunnelFile = "funnel.tsv";
inline constexpr std::string_view kFunnelTextFile = "funnel.txt";
inline constexpr std::string_view kStatsFile = "stats.tsv";
inline constexpr std::string_view kStatsTextFile = "stats.txt";
inline constexpr std::string_view kManifestFile = "manifest.txt";
inline constexpr std::string_view kStagingDir = ".staging";

struct PipelineConfig {
  fs::path prev_articles;
  fs::path recent_articles;
  ArticleFormat article_format = ArticleFormat::kArticleRecords;
  fs::path prev_triples;
  fs::path recent_triples;
  TripleFormat triple_format = TripleFormat::kTsv;
  fs::path mapping;
  fs::path diffset;      // optional precomputed diffset for the probes stage
  fs::path entity_types; // optional label -> type file for distributions
  std::string prev_tag = "2021-08";
  std::string recent_tag = "2021-09";
  fs::path output_dir = "out";

  std::uint64_t seed = 0;
  double sample_rate = 0.001;
  CapFractions caps;
  int workers = 0;  // 0: available parallelism
  bool case_insensitive = false;
  bool strip_markup = false;
  std::size_t top_k = 30;
  bool force = false;

  SnapshotPair pair() const { return {prev_tag, recent_tag}; }
  int EffectiveWorkers() const;
};

// Applies one key=value setting; keys match the field names above. Throws
// ValidationError on an unknown key or unparsable value.
void ApplySetting(PipelineConfig *config, std::string_view key, std::string_view value);

// key=value lines; blank lines and lines starting with '#' are ignored.
// Relative paths resolve against `base_dir`.
void LoadConfig(std::istream &in, PipelineConfig *config, const fs::path &base_dir = {});
void LoadConfigFile(const fs::path &path, PipelineConfig *config);

// Settings that determine output bytes, one "key=value" per line. Excludes
// paths, worker count and force.
std::string CanonicalSettings(const PipelineConfig &config);

enum class Stage { kDiffset, kProbes, kStats, kAll };

// Throws ValidationError when a path required by `stage` is missing or a
// parameter is out of range.
void ValidateConfig(const PipelineConfig &config, Stage stage);

struct DiffsetRun {
  std::vector<DiffsetEntry> entries;
  CorpusStats stats;
};

struct ProbesRun {
  std::vector<ProbeInstance> probes;
  FilterReport report;
};

struct RunSummary {
  bool skipped = false;  // run_all found a complete output directory
  std::optional<DiffsetRun> diffset;
  std::optional<ProbesRun> probes;
};

// Each stage validates, writes into <output_dir>/.staging and renames its
// files into place only after all of them were written.
DiffsetRun RunDiffset(const PipelineConfig &config);
ProbesRun RunProbes(const PipelineConfig &config);
void RunStats(const PipelineConfig &config);
RunSummary RunAll(const PipelineConfig &config, std::ostream *log = nullptr);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const fs::path &path);

}  // namespace snapkit

#endif  // SNAPKIT_PIPELINE_H_
