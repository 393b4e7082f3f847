#include "snapkit/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <nlohmann/json.hpp>

#include "snapkit/escape.h"
#include "xml_dump_reader.h"

namespace snapkit {

// ---- types ----------------------------------------------------------------

std::optional<int> ParseYearMonth(std::string_view tag) {
  if (tag.size() != 7 || tag[4] != '-') return std::nullopt;
  int year = 0, month = 0;
  auto y = std::from_chars(tag.data(), tag.data() + 4, year);
  auto m = std::from_chars(tag.data() + 5, tag.data() + 7, month);
  if (y.ec != std::errc() || y.ptr != tag.data() + 4) return std::nullopt;
  if (m.ec != std::errc() || m.ptr != tag.data() + 7) return std::nullopt;
  if (month < 1 || month > 12) return std::nullopt;
  return year * 12 + month - 1;
}

void SnapshotPair::Validate() const {
  auto prev = ParseYearMonth(prev_tag);
  auto recent = ParseYearMonth(recent_tag);
  if (!prev) throw ValidationError("snapshot tag is not YYYY-MM: '" + prev_tag + "'");
  if (!recent) throw ValidationError("snapshot tag is not YYYY-MM: '" + recent_tag + "'");
  if (*prev >= *recent) {
    throw ValidationError("previous snapshot " + prev_tag +
                          " must precede recent snapshot " + recent_tag);
  }
}

std::string SerializeProbe(const FactTriple &triple) {
  std::string out;
  out.reserve(triple.subject_label.size() + triple.relation_label.size() +
              triple.object_label.size() + 2);
  out.append(triple.subject_label).append(" ");
  out.append(triple.relation_label).append(" ");
  out.append(triple.object_label);
  return out;
}

std::string_view ToString(EntryKind kind) {
  return kind == EntryKind::kNewArticle ? "NewArticle" : "Updated";
}

std::string_view ToString(Category category) {
  return category == Category::kUnchanged ? "Unchanged" : "Changed";
}

std::string_view ToString(ChangeReason reason) {
  switch (reason) {
    case ChangeReason::kNewSubject: return "NewSubject";
    case ChangeReason::kNewRelation: return "NewRelation";
    case ChangeReason::kNewObject: return "NewObject";
    case ChangeReason::kSame: return "Same";
  }
  return "";
}

std::string_view ToString(AlignedKind kind) {
  return kind == AlignedKind::kDiffsetText ? "DiffsetText" : "FullArticleText";
}

std::optional<EntryKind> ParseEntryKind(std::string_view s) {
  if (s == "NewArticle") return EntryKind::kNewArticle;
  if (s == "Updated") return EntryKind::kUpdated;
  return std::nullopt;
}

std::optional<Category> ParseCategory(std::string_view s) {
  if (s == "Unchanged") return Category::kUnchanged;
  if (s == "Changed") return Category::kChanged;
  return std::nullopt;
}

std::optional<ChangeReason> ParseChangeReason(std::string_view s) {
  if (s == "NewSubject") return ChangeReason::kNewSubject;
  if (s == "NewRelation") return ChangeReason::kNewRelation;
  if (s == "NewObject") return ChangeReason::kNewObject;
  if (s == "Same") return ChangeReason::kSame;
  return std::nullopt;
}

std::optional<ArticleFormat> ParseArticleFormat(std::string_view name) {
  if (name == "xml-dump") return ArticleFormat::kXmlDump;
  if (name == "article-records") return ArticleFormat::kArticleRecords;
  return std::nullopt;
}

std::optional<TripleFormat> ParseTripleFormat(std::string_view name) {
  if (name == "tsv") return TripleFormat::kTsv;
  if (name == "json-records") return TripleFormat::kJsonRecords;
  return std::nullopt;
}

// ---- line-oriented helpers ------------------------------------------------

namespace {

constexpr std::string_view kRedirect = "#redirect";

// Splits and unescapes one line, enforcing the column count and UTF-8.
std::vector<std::string> ParseColumns(std::string_view line, std::uint64_t lineno,
                                      std::size_t expected, bool arity_error) {
  if (FindInvalidUtf8(line)) throw EncodingError(lineno);
  auto raw = SplitTabs(line);
  if (raw.size() != expected) {
    if (arity_error) throw ArityError(lineno, expected, raw.size());
    throw MalformedInput(lineno, "expected " + std::to_string(expected) +
                                     " columns, got " + std::to_string(raw.size()));
  }
  std::vector<std::string> fields;
  fields.reserve(raw.size());
  for (auto field : raw) {
    auto value = UnescapeField(field);
    if (!value) throw MalformedInput(lineno, "bad escape sequence");
    fields.push_back(std::move(*value));
  }
  return fields;
}

void ScrubLabel(std::string *label) {
  std::replace_if(label->begin(), label->end(),
                  [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
}

void CheckTriple(const FactTriple &t, std::uint64_t lineno) {
  if (t.subject_id.empty()) throw MalformedInput(lineno, "empty subject_id");
  if (t.relation_id.empty()) throw MalformedInput(lineno, "empty relation_id");
  if (t.object_label.empty()) throw MalformedInput(lineno, "empty object_label");
}

class RecordArticleReader : public ArticleReader {
 public:
  RecordArticleReader(std::istream &in, std::string tag)
      : lines_(in), tag_(std::move(tag)) {}

  std::optional<ArticleSnapshot> Next() override {
    while (lines_.Next(&line_)) {
      if (line_.empty()) continue;
      auto fields = ParseColumns(line_, lines_.line_number(), 3, false);
      if (fields[0].empty()) {
        throw MalformedInput(lines_.line_number(), "empty article_id");
      }
      if (IsRedirect(fields[2])) continue;
      return ArticleSnapshot{std::move(fields[0]), std::move(fields[1]),
                             std::move(fields[2]), tag_};
    }
    return std::nullopt;
  }

 private:
  LineReader lines_;
  std::string tag_;
  std::string line_;
};

class TsvTripleReader : public TripleReader {
 public:
  TsvTripleReader(std::istream &in, std::string tag)
      : lines_(in), tag_(std::move(tag)) {}

  std::optional<FactTriple> Next() override {
    while (lines_.Next(&line_)) {
      if (line_.empty()) continue;
      auto f = ParseColumns(line_, lines_.line_number(), 6, true);
      FactTriple t{std::move(f[0]), std::move(f[1]), std::move(f[2]),
                   std::move(f[3]), std::move(f[4]), std::move(f[5]), tag_};
      ScrubLabel(&t.subject_label);
      ScrubLabel(&t.relation_label);
      ScrubLabel(&t.object_label);
      CheckTriple(t, lines_.line_number());
      return t;
    }
    return std::nullopt;
  }

 private:
  LineReader lines_;
  std::string tag_;
  std::string line_;
};

class JsonTripleReader : public TripleReader {
 public:
  JsonTripleReader(std::istream &in, std::string tag)
      : lines_(in), tag_(std::move(tag)) {}

  std::optional<FactTriple> Next() override {
    while (lines_.Next(&line_)) {
      if (line_.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto lineno = lines_.line_number();
      if (FindInvalidUtf8(line_)) throw EncodingError(lineno);
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line_);
      } catch (const nlohmann::json::exception &e) {
        throw MalformedInput(lineno, e.what());
      }
      if (!record.is_object()) throw MalformedInput(lineno, "record is not an object");
      FactTriple t;
      t.subject_id = Field(record, "subject_id", lineno);
      t.subject_label = Field(record, "subject_label", lineno);
      t.relation_id = Field(record, "relation_id", lineno);
      t.relation_label = Field(record, "relation_label", lineno);
      t.object_id = Field(record, "object_id", lineno);
      t.object_label = Field(record, "object_label", lineno);
      t.snapshot_tag = tag_;
      ScrubLabel(&t.subject_label);
      ScrubLabel(&t.relation_label);
      ScrubLabel(&t.object_label);
      CheckTriple(t, lineno);
      return t;
    }
    return std::nullopt;
  }

 private:
  static std::string Field(const nlohmann::json &record, const char *key,
                           std::uint64_t lineno) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return {};
    if (!it->is_string()) {
      throw MalformedInput(lineno, std::string("field ") + key + " is not a string");
    }
    return it->get<std::string>();
  }

  LineReader lines_;
  std::string tag_;
  std::string line_;
};

void AppendFields(std::initializer_list<std::string_view> fields, std::string *out) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out->push_back('\t');
    first = false;
    AppendEscaped(f, out);
  }
}

}  // namespace

bool LineReader::Next(std::string *line) {
  if (!std::getline(in_, *line)) {
    if (in_.bad()) throw IoError("read failed after line " + std::to_string(line_number_));
    return false;
  }
  ++line_number_;
  return true;
}

bool IsRedirect(std::string_view text) {
  auto start = text.find_first_not_of(" \t\r\n");
  if (start == std::string_view::npos) return false;
  text.remove_prefix(start);
  if (text.size() < kRedirect.size()) return false;
  for (std::size_t i = 0; i < kRedirect.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != kRedirect[i]) return false;
  }
  return true;
}

std::unique_ptr<ArticleReader> OpenArticleReader(std::istream &in,
                                                 ArticleFormat format,
                                                 std::string snapshot_tag) {
  if (format == ArticleFormat::kXmlDump) {
    return MakeXmlDumpReader(in, std::move(snapshot_tag));
  }
  return std::make_unique<RecordArticleReader>(in, std::move(snapshot_tag));
}

std::vector<ArticleSnapshot> ReadArticles(std::istream &in, ArticleFormat format,
                                          const std::string &snapshot_tag) {
  auto reader = OpenArticleReader(in, format, snapshot_tag);
  std::vector<ArticleSnapshot> out;
  while (auto a = reader->Next()) out.push_back(std::move(*a));
  return out;
}

std::unique_ptr<TripleReader> OpenTripleReader(std::istream &in, TripleFormat format,
                                               std::string snapshot_tag) {
  if (format == TripleFormat::kJsonRecords) {
    return std::make_unique<JsonTripleReader>(in, std::move(snapshot_tag));
  }
  return std::make_unique<TsvTripleReader>(in, std::move(snapshot_tag));
}

std::vector<FactTriple> ReadTriples(std::istream &in, TripleFormat format,
                                    const std::string &snapshot_tag) {
  auto reader = OpenTripleReader(in, format, snapshot_tag);
  std::vector<FactTriple> out;
  while (auto t = reader->Next()) out.push_back(std::move(*t));
  return out;
}

void DeduplicateTriples(std::vector<FactTriple> *triples) {
  std::stable_sort(triples->begin(), triples->end(),
                   [](const FactTriple &a, const FactTriple &b) {
                     return FactKey(a) < FactKey(b);
                   });
  auto last = std::unique(triples->begin(), triples->end(),
                          [](const FactTriple &a, const FactTriple &b) {
                            return FactKey(a) == FactKey(b);
                          });
  triples->erase(last, triples->end());
}

// ---- entity mapping -------------------------------------------------------

void EntityMapping::Insert(MappingEntry entry) {
  if (auto it = by_entity_.find(entry.entity_id); it != by_entity_.end()) {
    if (entries_[it->second].article_id != entry.article_id) {
      throw DuplicateEntity(entry.entity_id);
    }
    return;
  }
  const std::size_t index = entries_.size();
  by_entity_.emplace(entry.entity_id, index);
  by_article_.emplace(entry.article_id, index);
  entries_.push_back(std::move(entry));
}

const MappingEntry *EntityMapping::FindByEntity(std::string_view entity_id) const {
  auto it = by_entity_.find(std::string(entity_id));
  return it == by_entity_.end() ? nullptr : &entries_[it->second];
}

const MappingEntry *EntityMapping::FindByArticle(std::string_view article_id) const {
  auto it = by_article_.find(std::string(article_id));
  return it == by_article_.end() ? nullptr : &entries_[it->second];
}

EntityMapping ReadMapping(std::istream &in) {
  EntityMapping mapping;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = ParseColumns(line, lines.line_number(), 3, false);
    if (f[0].empty() || f[2].empty()) {
      throw MalformedInput(lines.line_number(), "empty article_id or entity_id");
    }
    mapping.Insert({std::move(f[0]), std::move(f[1]), std::move(f[2])});
  }
  return mapping;
}

// ---- output-side readers --------------------------------------------------

std::vector<DiffsetEntry> ReadDiffset(std::istream &in, const SnapshotPair &pair) {
  std::vector<DiffsetEntry> out;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = ParseColumns(line, lines.line_number(), 4, false);
    auto kind = ParseEntryKind(f[2]);
    if (!kind) throw MalformedInput(lines.line_number(), "unknown entry kind '" + f[2] + "'");
    out.push_back({std::move(f[0]), std::move(f[1]), *kind, std::move(f[3]), pair});
  }
  return out;
}

std::vector<CategorizedFact> ReadCategorized(std::istream &in) {
  std::vector<CategorizedFact> out;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = ParseColumns(line, lines.line_number(), 8, false);
    auto category = ParseCategory(f[0]);
    auto reason = ParseChangeReason(f[7]);
    if (!category || !reason) {
      throw MalformedInput(lines.line_number(), "unknown category or reason");
    }
    CategorizedFact fact;
    fact.triple = {std::move(f[1]), std::move(f[2]), std::move(f[3]),
                   std::move(f[4]), std::move(f[5]), std::move(f[6]), {}};
    fact.category = *category;
    fact.reason = *reason;
    out.push_back(std::move(fact));
  }
  return out;
}

std::vector<ProbeInstance> ReadProbes(std::istream &in) {
  std::vector<ProbeInstance> out;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = ParseColumns(line, lines.line_number(), 6, false);
    auto category = ParseCategory(f[0]);
    if (!category) throw MalformedInput(lines.line_number(), "unknown category '" + f[0] + "'");
    ProbeInstance p;
    p.category = *category;
    p.triple.subject_label = std::move(f[1]);
    p.triple.relation_label = std::move(f[2]);
    p.triple.object_label = std::move(f[3]);
    p.aligned_article_id = std::move(f[4]);
    p.aligned_kind = *category == Category::kChanged ? AlignedKind::kDiffsetText
                                                     : AlignedKind::kFullArticleText;
    p.serialized = std::move(f[5]);
    out.push_back(std::move(p));
  }
  return out;
}

// ---- serializers ----------------------------------------------------------

void FormatRecord(const ArticleSnapshot &a, std::string *out) {
  AppendFields({a.article_id, a.title, a.text}, out);
}

void FormatRecord(const FactTriple &t, std::string *out) {
  AppendFields({t.subject_id, t.subject_label, t.relation_id, t.relation_label,
                t.object_id, t.object_label},
               out);
}

void FormatRecord(const MappingEntry &m, std::string *out) {
  AppendFields({m.article_id, m.title, m.entity_id}, out);
}

void FormatRecord(const DiffsetEntry &e, std::string *out) {
  AppendFields({e.article_id, e.title, ToString(e.kind), e.text}, out);
}

void FormatRecord(const CategorizedFact &f, std::string *out) {
  const FactTriple &t = f.triple;
  AppendFields({ToString(f.category), t.subject_id, t.subject_label, t.relation_id,
                t.relation_label, t.object_id, t.object_label, ToString(f.reason)},
               out);
}

void FormatRecord(const ProbeInstance &p, std::string *out) {
  AppendFields({ToString(p.category), p.triple.subject_label, p.triple.relation_label,
                p.triple.object_label, p.aligned_article_id, p.serialized},
               out);
}

}  // namespace snapkit
