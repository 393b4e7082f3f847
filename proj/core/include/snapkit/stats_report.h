#ifndef SNAPKIT_STATS_REPORT_H_
#define SNAPKIT_STATS_REPORT_H_

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snapkit/probe_qc.h"
#include "snapkit/types.h"

namespace snapkit {

// Article and whitespace-token counts for a snapshot or diffset.
struct CorpusStats {
  std::string tag;
  std::size_t article_count = 0;
  std::size_t token_count = 0;

  void Add(std::string_view text);
  CorpusStats &operator+=(const CorpusStats &other);
  bool operator==(const CorpusStats &) const = default;
};

std::size_t CountTokens(std::string_view text);

CorpusStats ComputeCorpusStats(std::span<const DiffsetEntry> entries, std::string tag);
CorpusStats ComputeCorpusStats(std::span<const ArticleSnapshot> articles, std::string tag);

// Unchanged/Changed counts per stage as an aligned text table. Throws
// RenderError if the report is not monotone.
std::string RenderFunnel(const FilterReport &report);
// Same counts as tab-separated rows: stage, unchanged, changed, total.
std::string RenderFunnelTsv(const FilterReport &report);
// Inverse of RenderFunnelTsv.
FilterReport ParseFunnelTsv(std::istream &in);

enum class DistributionKey { kRelation, kSubjectEntity, kObjectEntity };
std::string_view ToString(DistributionKey key);

struct DistributionRow {
  std::string label;
  std::size_t count = 0;
  double fraction = 0.0;

  bool operator==(const DistributionRow &) const = default;
};

struct DistributionReport {
  DistributionKey key = DistributionKey::kRelation;
  std::size_t total = 0;
  std::vector<DistributionRow> rows;  // descending count, ties by label
};

// entity id or entity label -> type label. Ids are tried first; probe files
// carry labels only.
using TypeMapping = std::unordered_map<std::string, std::string>;

TypeMapping ReadTypeMapping(std::istream &in);

// Top-k labels of the given field. With a type mapping, subject/object
// entities are replaced by their type ("unknown" if unmapped).
DistributionReport Distribution(std::span<const ProbeInstance> instances,
                                DistributionKey key, std::size_t k = 30,
                                const TypeMapping *types = nullptr);

std::string RenderCorpusStats(std::span<const CorpusStats> stats);
std::string RenderCorpusStatsTsv(std::span<const CorpusStats> stats);
std::string RenderDistribution(const DistributionReport &report);
std::string RenderDistributionTsv(const DistributionReport &report);

}  // namespace snapkit

#endif  // SNAPKIT_STATS_REPORT_H_
