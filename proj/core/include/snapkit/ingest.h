#ifndef SNAPKIT_INGEST_H_
#define SNAPKIT_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <ranges>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snapkit/errors.h"
#include "snapkit/types.h"

namespace snapkit {

enum class ArticleFormat { kXmlDump, kArticleRecords };
enum class TripleFormat { kTsv, kJsonRecords };

std::optional<ArticleFormat> ParseArticleFormat(std::string_view name);
std::optional<TripleFormat> ParseTripleFormat(std::string_view name);

// True if the text starts (after leading whitespace) with a case-insensitive
// "#REDIRECT" directive.
bool IsRedirect(std::string_view text);

// Reads newline-terminated lines and tracks the 1-based line number.
class LineReader {
 public:
  explicit LineReader(std::istream &in) : in_(in) {}
  bool Next(std::string *line);
  std::uint64_t line_number() const { return line_number_; }

 private:
  std::istream &in_;
  std::uint64_t line_number_ = 0;
};

// Single-consumer pull stream of articles.
class ArticleReader {
 public:
  virtual ~ArticleReader() = default;
  virtual std::optional<ArticleSnapshot> Next() = 0;
};

// Skips redirect pages in both formats and non-main-namespace pages in XML
// dumps. Throws MalformedInput or EncodingError while reading.
std::unique_ptr<ArticleReader> OpenArticleReader(std::istream &in,
                                                 ArticleFormat format,
                                                 std::string snapshot_tag);

std::vector<ArticleSnapshot> ReadArticles(std::istream &in,
                                          ArticleFormat format,
                                          const std::string &snapshot_tag);

class TripleReader {
 public:
  virtual ~TripleReader() = default;
  virtual std::optional<FactTriple> Next() = 0;
};

// Tab, newline and carriage return inside labels are replaced by a space.
std::unique_ptr<TripleReader> OpenTripleReader(std::istream &in,
                                               TripleFormat format,
                                               std::string snapshot_tag);

std::vector<FactTriple> ReadTriples(std::istream &in, TripleFormat format,
                                    const std::string &snapshot_tag);

// Sorts by (subject_id, relation_id, object_label) and drops exact key
// duplicates, keeping the first occurrence in source order.
void DeduplicateTriples(std::vector<FactTriple> *triples);

struct MappingEntry {
  std::string article_id;
  std::string title;
  std::string entity_id;

  bool operator==(const MappingEntry &) const = default;
};

// Knowledge-base entity id <-> article id/title dictionary.
class EntityMapping {
 public:
  // Throws DuplicateEntity if entity_id already maps to another article.
  // Re-inserting an identical pairing is a no-op.
  void Insert(MappingEntry entry);

  const MappingEntry *FindByEntity(std::string_view entity_id) const;
  const MappingEntry *FindByArticle(std::string_view article_id) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<MappingEntry> &entries() const { return entries_; }

 private:
  std::vector<MappingEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_entity_;
  std::unordered_map<std::string, std::size_t> by_article_;
};

EntityMapping ReadMapping(std::istream &in);

// Output-side readers for files this library writes.
std::vector<DiffsetEntry> ReadDiffset(std::istream &in,
                                      const SnapshotPair &pair);
std::vector<CategorizedFact> ReadCategorized(std::istream &in);
// The probe file carries labels only; ids other than the aligned article
// are left empty.
std::vector<ProbeInstance> ReadProbes(std::istream &in);

// Serializers: one record, no trailing newline, fields escaped.
void FormatRecord(const ArticleSnapshot &a, std::string *out);
void FormatRecord(const FactTriple &t, std::string *out);
void FormatRecord(const MappingEntry &m, std::string *out);
void FormatRecord(const DiffsetEntry &e, std::string *out);
void FormatRecord(const CategorizedFact &f, std::string *out);
void FormatRecord(const ProbeInstance &p, std::string *out);

template <typename T>
concept Record = requires(const T &r, std::string *out) { FormatRecord(r, out); };

// Writes one line per record and returns the number written.
template <std::ranges::input_range R>
  requires Record<std::ranges::range_value_t<R>>
std::size_t WriteRecords(const R &records, std::ostream &sink) {
  std::size_t count = 0;
  std::string line;
  for (const auto &record : records) {
    line.clear();
    FormatRecord(record, &line);
    line.push_back('\n');
    sink.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!sink) throw IoError("write failed after " + std::to_string(count) + " records");
    ++count;
  }
  sink.flush();
  if (!sink) throw IoError("flush failed");
  return count;
}

}  // namespace snapkit

#endif  // SNAPKIT_INGEST_H_
