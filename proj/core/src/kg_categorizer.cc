#include "snapkit/kg_categorizer.h"

#include "snapkit/ingest.h"
#include "snapkit/parallel.h"

namespace snapkit {

bool SameObject(const FactTriple &a, const FactTriple &b) {
  if (!a.object_id.empty() && !b.object_id.empty()) return a.object_id == b.object_id;
  return a.object_label == b.object_label;
}

PreviousFactIndex::PreviousFactIndex(std::span<const FactTriple> previous) {
  for (const FactTriple &t : previous) {
    by_subject_[t.subject_id].push_back({t.relation_id, t.object_id, t.object_label});
  }
}

CategorizedFact PreviousFactIndex::Categorize(const FactTriple &recent) const {
  CategorizedFact out{recent, Category::kChanged, ChangeReason::kNewSubject};
  auto it = by_subject_.find(recent.subject_id);
  if (it == by_subject_.end()) return out;

  bool relation_seen = false;
  for (const Entry &e : it->second) {
    if (e.relation_id != recent.relation_id) continue;
    relation_seen = true;
    const bool same = (!e.object_id.empty() && !recent.object_id.empty())
                          ? e.object_id == recent.object_id
                          : e.object_label == recent.object_label;
    if (same) {
      out.category = Category::kUnchanged;
      out.reason = ChangeReason::kSame;
      return out;
    }
  }
  out.reason = relation_seen ? ChangeReason::kNewObject : ChangeReason::kNewRelation;
  return out;
}

std::vector<CategorizedFact> Categorize(std::vector<FactTriple> previous,
                                        std::vector<FactTriple> recent, int workers) {
  DeduplicateTriples(&previous);
  DeduplicateTriples(&recent);
  const PreviousFactIndex index(previous);
  previous.clear();
  previous.shrink_to_fit();

  std::vector<CategorizedFact> out(recent.size());
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (recent.size() + kBlock - 1) / kBlock;
  ParallelFor(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(recent.size(), (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) out[i] = index.Categorize(recent[i]);
  });
  return out;
}

}  // namespace snapkit
