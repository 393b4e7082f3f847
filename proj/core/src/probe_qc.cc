#include "snapkit/probe_qc.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "snapkit/errors.h"
#include "snapkit/parallel.h"
#include "snapkit/textseg.h"

namespace snapkit {
namespace {

bool NonIncreasing(const StageCounts &from, const StageCounts &to) {
  return to.unchanged <= from.unchanged && to.changed <= from.changed;
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

bool FilterReport::IsMonotone() const {
  return NonIncreasing(categorized, input) && NonIncreasing(input, after_alignment) &&
         NonIncreasing(after_alignment, after_rule1) &&
         NonIncreasing(after_rule1, after_rule2) && NonIncreasing(after_rule2, after_rule3);
}

void ArticleTextIndex::Add(std::string article_id, std::string normalized_text) {
  texts_.insert_or_assign(std::move(article_id), std::move(normalized_text));
}

const std::string *ArticleTextIndex::Find(std::string_view article_id) const {
  auto it = texts_.find(std::string(article_id));
  return it == texts_.end() ? nullptr : &it->second;
}

ArticleTextIndex ArticleTextIndex::FromDiffset(std::span<const DiffsetEntry> entries) {
  ArticleTextIndex index;
  for (const DiffsetEntry &e : entries) index.Add(e.article_id, e.text);
  return index;
}

std::vector<CategorizedFact> SampleUnchanged(std::vector<CategorizedFact> facts,
                                             double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) throw InvalidRate(rate);
  std::mt19937_64 rng(seed);
  std::vector<CategorizedFact> kept;
  kept.reserve(facts.size());
  for (CategorizedFact &f : facts) {
    if (f.category == Category::kUnchanged) {
      // 53 high bits -> uniform double in [0, 1), identical on every platform.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u >= rate) continue;
    }
    kept.push_back(std::move(f));
  }
  return kept;
}

bool ContainsText(std::string_view haystack, std::string_view needle,
                  bool case_insensitive) {
  const std::string normalized = Normalize(needle);
  if (normalized.empty()) return false;
  if (case_insensitive) {
    return FoldCase(haystack).find(FoldCase(normalized)) != std::string::npos;
  }
  return haystack.find(normalized) != std::string_view::npos;
}

std::vector<ProbeInstance> Align(std::span<const CategorizedFact> facts,
                                 const EntityMapping &mapping,
                                 const ArticleTextIndex &diffset,
                                 const ArticleTextIndex &full_recent,
                                 const QcOptions &options, AlignmentDrops *drops) {
  enum class Outcome { kKept, kUnmapped, kMissingArticle, kObjectAbsent };
  std::vector<Outcome> outcomes(facts.size());
  std::vector<std::optional<ProbeInstance>> kept(facts.size());

  ParallelFor(facts.size(), options.workers, [&](std::size_t i) {
    const CategorizedFact &fact = facts[i];
    const MappingEntry *entry = mapping.FindByEntity(fact.triple.subject_id);
    if (entry == nullptr) {
      outcomes[i] = Outcome::kUnmapped;
      return;
    }
    const bool changed = fact.category == Category::kChanged;
    const ArticleTextIndex &target = changed ? diffset : full_recent;
    const std::string *text = target.Find(entry->article_id);
    if (text == nullptr) {
      outcomes[i] = Outcome::kMissingArticle;
      return;
    }
    if (!ContainsText(*text, fact.triple.object_label, options.case_insensitive)) {
      outcomes[i] = Outcome::kObjectAbsent;
      return;
    }
    outcomes[i] = Outcome::kKept;
    kept[i] = ProbeInstance{fact.triple, fact.category, entry->article_id,
                            changed ? AlignedKind::kDiffsetText : AlignedKind::kFullArticleText,
                            SerializeProbe(fact.triple)};
  });

  std::vector<ProbeInstance> out;
  AlignmentDrops tally;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    switch (outcomes[i]) {
      case Outcome::kKept: out.push_back(std::move(*kept[i])); break;
      case Outcome::kUnmapped: ++tally.unmapped; break;
      case Outcome::kMissingArticle: ++tally.missing_article; break;
      case Outcome::kObjectAbsent: ++tally.object_absent; break;
    }
  }
  if (drops != nullptr) *drops = tally;
  return out;
}

std::vector<ProbeInstance> FilterSubstring(std::vector<ProbeInstance> instances,
                                           bool case_insensitive) {
  std::erase_if(instances, [&](const ProbeInstance &p) {
    std::string subject = Normalize(p.triple.subject_label);
    std::string object = Normalize(p.triple.object_label);
    if (case_insensitive) {
      subject = FoldCase(subject);
      object = FoldCase(object);
    }
    return subject.find(object) != std::string::npos ||
           object.find(subject) != std::string::npos;
  });
  return instances;
}

std::size_t CountWords(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

std::vector<ProbeInstance> FilterObjectLength(std::vector<ProbeInstance> instances) {
  std::erase_if(instances, [](const ProbeInstance &p) {
    return CountWords(p.triple.object_label) > 5;
  });
  return instances;
}

std::size_t FrequencyCap(double fraction, std::size_t n) {
  const auto cap = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return std::max<std::size_t>(1, cap);
}

std::vector<ProbeInstance> FilterFrequency(std::vector<ProbeInstance> instances,
                                           const CapFractions &caps) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const ProbeInstance &a, const ProbeInstance &b) {
                     return FactKey(a.triple) < FactKey(b.triple);
                   });
  const std::size_t n = instances.size();
  const std::size_t subject_cap = FrequencyCap(caps.subject, n);
  const std::size_t object_cap = FrequencyCap(caps.object, n);
  const std::size_t relation_cap = FrequencyCap(caps.relation, n);

  std::unordered_map<std::string, std::size_t> subjects, objects, relations;
  std::vector<ProbeInstance> kept;
  for (ProbeInstance &p : instances) {
    std::size_t &s = subjects[p.triple.subject_label];
    std::size_t &o = objects[p.triple.object_label];
    std::size_t &r = relations[p.triple.relation_label];
    if (s < subject_cap && o < object_cap && r < relation_cap) {
      ++s;
      ++o;
      ++r;
      kept.push_back(std::move(p));
    }
  }
  return kept;
}

QcResult AlignAndFilter(std::vector<CategorizedFact> sampled, const EntityMapping &mapping,
                        const ArticleTextIndex &diffset,
                        const ArticleTextIndex &full_recent, const QcOptions &options) {
  QcResult result;
  FilterReport &report = result.report;
  report.input = CountByCategory(sampled);

  AlignmentDrops drops;
  auto probes = Align(sampled, mapping, diffset, full_recent, options, &drops);
  sampled.clear();
  report.after_alignment = CountByCategory(probes);
  report.dropped_unmapped = drops.unmapped;
  report.dropped_missing_article = drops.missing_article;
  report.dropped_object_absent = drops.object_absent;

  probes = FilterSubstring(std::move(probes), options.case_insensitive);
  report.after_rule1 = CountByCategory(probes);
  probes = FilterObjectLength(std::move(probes));
  report.after_rule2 = CountByCategory(probes);
  probes = FilterFrequency(std::move(probes), options.caps);
  report.after_rule3 = CountByCategory(probes);

  result.probes = std::move(probes);
  return result;
}

QcResult RunQualityControl(std::vector<CategorizedFact> categorized,
                           const EntityMapping &mapping,
                           const ArticleTextIndex &diffset,
                           const ArticleTextIndex &full_recent, double sample_rate,
                           std::uint64_t seed, const QcOptions &options) {
  const StageCounts initial = CountByCategory(categorized);
  auto sampled = SampleUnchanged(std::move(categorized), sample_rate, seed);
  QcResult result = AlignAndFilter(std::move(sampled), mapping, diffset, full_recent, options);
  result.report.categorized = initial;
  return result;
}

}  // namespace snapkit
