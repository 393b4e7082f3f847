#ifndef SNAPKIT_TYPES_H_
#define SNAPKIT_TYPES_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace snapkit {

// One article of one snapshot.
struct ArticleSnapshot {
  std::string article_id;
  std::string title;
  std::string text;
  std::string snapshot_tag;

  bool operator==(const ArticleSnapshot &) const = default;
};

// A (subject, relation, object) fact. Literal objects (dates, quantities)
// carry an empty object_id and are matched by object_label.
struct FactTriple {
  std::string subject_id;
  std::string subject_label;
  std::string relation_id;
  std::string relation_label;
  std::string object_id;
  std::string object_label;
  std::string snapshot_tag;

  bool operator==(const FactTriple &) const = default;
};

// Canonical ordering key used everywhere facts are sorted or deduplicated.
inline auto FactKey(const FactTriple &t) {
  return std::tie(t.subject_id, t.relation_id, t.object_label);
}

// A pair of consecutive snapshot tags, each of the form YYYY-MM.
struct SnapshotPair {
  std::string prev_tag;
  std::string recent_tag;

  // Throws ValidationError unless both tags parse and prev precedes recent.
  void Validate() const;
  // "2021-08" + "2021-09" -> "2021-08..2021-09"
  std::string Label() const { return prev_tag + ".." + recent_tag; }

  bool operator==(const SnapshotPair &) const = default;
};

// Parses "YYYY-MM" into a month ordinal (year * 12 + month - 1).
std::optional<int> ParseYearMonth(std::string_view tag);

enum class EntryKind { kNewArticle, kUpdated };

// New or updated text extracted for one article.
struct DiffsetEntry {
  std::string article_id;
  std::string title;
  EntryKind kind = EntryKind::kNewArticle;
  std::string text;
  SnapshotPair source_pair;

  bool operator==(const DiffsetEntry &) const = default;
};

enum class Category { kUnchanged, kChanged };
enum class ChangeReason { kNewSubject, kNewRelation, kNewObject, kSame };

struct CategorizedFact {
  FactTriple triple;
  Category category = Category::kUnchanged;
  ChangeReason reason = ChangeReason::kSame;

  bool operator==(const CategorizedFact &) const = default;
};

enum class AlignedKind { kDiffsetText, kFullArticleText };

// A categorized, aligned fact ready for use as an evaluation probe.
struct ProbeInstance {
  FactTriple triple;
  Category category = Category::kUnchanged;
  std::string aligned_article_id;
  AlignedKind aligned_kind = AlignedKind::kFullArticleText;
  std::string serialized;

  bool operator==(const ProbeInstance &) const = default;
};

// subject + " " + relation + " " + object
std::string SerializeProbe(const FactTriple &triple);

std::string_view ToString(EntryKind kind);
std::string_view ToString(Category category);
std::string_view ToString(ChangeReason reason);
std::string_view ToString(AlignedKind kind);

std::optional<EntryKind> ParseEntryKind(std::string_view s);
std::optional<Category> ParseCategory(std::string_view s);
std::optional<ChangeReason> ParseChangeReason(std::string_view s);

}  // namespace snapkit

#endif  // SNAPKIT_TYPES_H_
