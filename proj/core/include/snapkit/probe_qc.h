#ifndef SNAPKIT_PROBE_QC_H_
#define SNAPKIT_PROBE_QC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snapkit/ingest.h"
#include "snapkit/types.h"

namespace snapkit {

struct StageCounts {
  std::size_t unchanged = 0;
  std::size_t changed = 0;

  std::size_t total() const { return unchanged + changed; }
  void Add(Category c) { (c == Category::kUnchanged ? unchanged : changed)++; }
  bool operator==(const StageCounts &) const = default;
};

template <typename Range>
StageCounts CountByCategory(const Range &items) {
  StageCounts counts;
  for (const auto &item : items) counts.Add(item.category);
  return counts;
}

// Per-stage, per-category instance counts through quality control.
struct FilterReport {
  StageCounts categorized;  // categorizer output, before sampling
  StageCounts input;        // after Unchanged sampling; the alignment input
  StageCounts after_alignment;
  StageCounts after_rule1;
  StageCounts after_rule2;
  StageCounts after_rule3;

  // Alignment drops by cause.
  std::size_t dropped_unmapped = 0;        // subject has no mapping entry
  std::size_t dropped_missing_article = 0; // mapped article absent from the target text set
  std::size_t dropped_object_absent = 0;   // object not found in the article text

  // Counts never increase from one stage to the next, per category.
  bool IsMonotone() const;
  bool operator==(const FilterReport &) const = default;
};

struct CapFractions {
  double subject = 0.01;
  double object = 0.05;
  double relation = 0.05;
};

struct QcOptions {
  bool case_insensitive = false;
  CapFractions caps;
  int workers = 1;
};

// article_id -> normalized text.
class ArticleTextIndex {
 public:
  void Add(std::string article_id, std::string normalized_text);
  const std::string *Find(std::string_view article_id) const;
  bool Contains(std::string_view article_id) const { return Find(article_id) != nullptr; }
  std::size_t size() const { return texts_.size(); }

  static ArticleTextIndex FromDiffset(std::span<const DiffsetEntry> entries);

 private:
  std::unordered_map<std::string, std::string> texts_;
};

// Keeps each Unchanged fact independently with probability `rate`, drawing
// from a mt19937_64 seeded with `seed` in input order. Changed facts pass
// through. Throws InvalidRate unless 0 < rate <= 1.
std::vector<CategorizedFact> SampleUnchanged(std::vector<CategorizedFact> facts,
                                             double rate, std::uint64_t seed);

struct AlignmentDrops {
  std::size_t unmapped = 0;
  std::size_t missing_article = 0;
  std::size_t object_absent = 0;
};

// Changed facts align against the diffset text of the subject's article,
// Unchanged facts against the full recent text. Input order is preserved.
std::vector<ProbeInstance> Align(std::span<const CategorizedFact> facts,
                                 const EntityMapping &mapping,
                                 const ArticleTextIndex &diffset,
                                 const ArticleTextIndex &full_recent,
                                 const QcOptions &options = {},
                                 AlignmentDrops *drops = nullptr);

// Whether `needle` occurs in `haystack` after normalizing the needle
// (haystack is expected normalized). Optionally case-insensitive.
bool ContainsText(std::string_view haystack, std::string_view needle,
                  bool case_insensitive);

// Rule 1: drop instances whose subject label contains the object label or
// vice versa.
std::vector<ProbeInstance> FilterSubstring(std::vector<ProbeInstance> instances,
                                           bool case_insensitive = false);

// Rule 2: drop instances whose object label has more than five
// whitespace-delimited words.
std::vector<ProbeInstance> FilterObjectLength(std::vector<ProbeInstance> instances);

std::size_t CountWords(std::string_view text);

// Per-label caps for Rule 3: max(1, floor(fraction * n)).
std::size_t FrequencyCap(double fraction, std::size_t n);

// Rule 3: sorts into canonical (subject_id, relation_id, object_label) order
// and keeps an instance iff its subject, object and relation label counters
// are all strictly below their caps, then bumps all three.
std::vector<ProbeInstance> FilterFrequency(std::vector<ProbeInstance> instances,
                                           const CapFractions &caps = {});

struct QcResult {
  std::vector<ProbeInstance> probes;
  FilterReport report;
};

// align -> rule 1 -> rule 2 -> rule 3 over already-sampled facts. Fills the
// report from `input` onwards.
QcResult AlignAndFilter(std::vector<CategorizedFact> sampled, const EntityMapping &mapping,
                        const ArticleTextIndex &diffset,
                        const ArticleTextIndex &full_recent, const QcOptions &options = {});

// sample -> align -> rule 1 -> rule 2 -> rule 3, with a funnel report.
QcResult RunQualityControl(std::vector<CategorizedFact> categorized,
                           const EntityMapping &mapping,
                           const ArticleTextIndex &diffset,
                           const ArticleTextIndex &full_recent, double sample_rate,
                           std::uint64_t seed, const QcOptions &options = {});

}  // namespace snapkit

#endif  // SNAPKIT_PROBE_QC_H_
