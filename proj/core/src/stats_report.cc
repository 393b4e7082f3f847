#include "snapkit/stats_report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "snapkit/errors.h"
#include "snapkit/escape.h"
#include "snapkit/ingest.h"

namespace snapkit {
namespace {

struct StageRow {
  std::string_view name;
  StageCounts FilterReport::*counts;
};

constexpr StageRow kStages[] = {
    {"categorized", &FilterReport::categorized},
    {"sampled", &FilterReport::input},
    {"aligned", &FilterReport::after_alignment},
    {"rule1_substring", &FilterReport::after_rule1},
    {"rule2_object_length", &FilterReport::after_rule2},
    {"rule3_frequency", &FilterReport::after_rule3},
};

struct DropRow {
  std::string_view name;
  std::size_t FilterReport::*count;
};

constexpr DropRow kDrops[] = {
    {"unmapped", &FilterReport::dropped_unmapped},
    {"missing_article", &FilterReport::dropped_missing_article},
    {"object_absent", &FilterReport::dropped_object_absent},
};

std::string FormatFraction(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", f);
  return buf;
}

std::size_t ParseCount(std::string_view s, std::uint64_t lineno) {
  std::size_t value = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), value);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw MalformedInput(lineno, "bad count '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::size_t CountTokens(std::string_view text) {
  std::size_t tokens = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (space) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++tokens;
    }
  }
  return tokens;
}

void CorpusStats::Add(std::string_view text) {
  ++article_count;
  token_count += CountTokens(text);
}

CorpusStats &CorpusStats::operator+=(const CorpusStats &other) {
  article_count += other.article_count;
  token_count += other.token_count;
  return *this;
}

CorpusStats ComputeCorpusStats(std::span<const DiffsetEntry> entries, std::string tag) {
  CorpusStats stats{std::move(tag)};
  for (const DiffsetEntry &e : entries) stats.Add(e.text);
  return stats;
}

CorpusStats ComputeCorpusStats(std::span<const ArticleSnapshot> articles, std::string tag) {
  CorpusStats stats{std::move(tag)};
  for (const ArticleSnapshot &a : articles) stats.Add(a.text);
  return stats;
}

std::string RenderFunnel(const FilterReport &report) {
  if (!report.IsMonotone()) {
    throw RenderError("funnel counts increase between stages");
  }
  std::ostringstream out;
  // Headline: initial categorization -> alignment -> heuristic filtering.
  out << std::left << std::setw(28) << "Initial Categorization" << std::setw(28)
      << "Alignment" << "Heuristic Filtering\n";
  auto pair = [&](const StageCounts &c) {
    std::ostringstream cell;
    cell << "Un " << std::setw(10) << c.unchanged << " C " << c.changed;
    out << std::left << std::setw(28) << cell.str();
  };
  pair(report.input);
  pair(report.after_alignment);
  pair(report.after_rule3);
  out << "\n\n";

  out << std::left << std::setw(22) << "stage" << std::right << std::setw(12) << "Un"
      << std::setw(12) << "C" << std::setw(12) << "total" << "\n";
  for (const StageRow &row : kStages) {
    const StageCounts &c = report.*row.counts;
    out << std::left << std::setw(22) << row.name << std::right << std::setw(12)
        << c.unchanged << std::setw(12) << c.changed << std::setw(12) << c.total() << "\n";
  }
  out << "\nalignment drops:";
  for (const DropRow &row : kDrops) out << " " << row.name << "=" << report.*row.count;
  out << "\n";
  return out.str();
}

std::string RenderFunnelTsv(const FilterReport &report) {
  if (!report.IsMonotone()) {
    throw RenderError("funnel counts increase between stages");
  }
  std::string out;
  for (const StageRow &row : kStages) {
    const StageCounts &c = report.*row.counts;
    out.append(row.name).append("\tUnchanged\t").append(std::to_string(c.unchanged)).append("\n");
    out.append(row.name).append("\tChanged\t").append(std::to_string(c.changed)).append("\n");
  }
  for (const DropRow &row : kDrops) {
    out.append("alignment_drop\t").append(row.name).append("\t");
    out.append(std::to_string(report.*row.count)).append("\n");
  }
  return out;
}

FilterReport ParseFunnelTsv(std::istream &in) {
  FilterReport report;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 3) throw MalformedInput(lines.line_number(), "expected 3 columns");
    const std::size_t value = ParseCount(f[2], lines.line_number());
    bool matched = false;
    if (f[0] == "alignment_drop") {
      for (const DropRow &row : kDrops) {
        if (f[1] == row.name) {
          report.*row.count = value;
          matched = true;
        }
      }
    } else {
      auto category = ParseCategory(f[1]);
      for (const StageRow &row : kStages) {
        if (f[0] == row.name && category) {
          StageCounts &c = report.*row.counts;
          (*category == Category::kUnchanged ? c.unchanged : c.changed) = value;
          matched = true;
        }
      }
    }
    if (!matched) throw MalformedInput(lines.line_number(), "unknown funnel row");
  }
  return report;
}

std::string_view ToString(DistributionKey key) {
  switch (key) {
    case DistributionKey::kRelation: return "relation";
    case DistributionKey::kSubjectEntity: return "subject";
    case DistributionKey::kObjectEntity: return "object";
  }
  return "";
}

TypeMapping ReadTypeMapping(std::istream &in) {
  TypeMapping types;
  LineReader lines(in);
  std::string line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 2) throw MalformedInput(lines.line_number(), "expected 2 columns");
    auto id = UnescapeField(f[0]);
    auto type = UnescapeField(f[1]);
    if (!id || !type) throw MalformedInput(lines.line_number(), "bad escape sequence");
    types.insert_or_assign(std::move(*id), std::move(*type));
  }
  return types;
}

DistributionReport Distribution(std::span<const ProbeInstance> instances,
                                DistributionKey key, std::size_t k,
                                const TypeMapping *types) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const ProbeInstance &p : instances) {
    const FactTriple &t = p.triple;
    std::string label;
    switch (key) {
      case DistributionKey::kRelation:
        label = t.relation_label;
        break;
      case DistributionKey::kSubjectEntity:
      case DistributionKey::kObjectEntity: {
        const bool subject = key == DistributionKey::kSubjectEntity;
        const std::string &id = subject ? t.subject_id : t.object_id;
        const std::string &name = subject ? t.subject_label : t.object_label;
        if (types != nullptr) {
          auto it = id.empty() ? types->end() : types->find(id);
          if (it == types->end()) it = types->find(name);
          label = it == types->end() ? "unknown" : it->second;
        } else {
          label = name;
        }
        break;
      }
    }
    ++counts[label];
  }

  DistributionReport report;
  report.key = key;
  report.total = instances.size();
  report.rows.reserve(counts.size());
  for (auto &[label, count] : counts) report.rows.push_back({label, count, 0.0});
  std::sort(report.rows.begin(), report.rows.end(),
            [](const DistributionRow &a, const DistributionRow &b) {
              if (a.count != b.count) return a.count > b.count;
              return a.label < b.label;
            });
  if (report.rows.size() > k) report.rows.resize(k);
  for (DistributionRow &row : report.rows) {
    row.fraction = static_cast<double>(row.count) / static_cast<double>(report.total);
  }
  return report;
}

std::string RenderCorpusStats(std::span<const CorpusStats> stats) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "corpus" << std::right << std::setw(14)
      << "# articles" << std::setw(16) << "# tokens" << "\n";
  for (const CorpusStats &s : stats) {
    out << std::left << std::setw(28) << s.tag << std::right << std::setw(14)
        << s.article_count << std::setw(16) << s.token_count << "\n";
  }
  return out.str();
}

std::string RenderCorpusStatsTsv(std::span<const CorpusStats> stats) {
  std::string out;
  for (const CorpusStats &s : stats) {
    AppendEscaped(s.tag, &out);
    out.append("\t").append(std::to_string(s.article_count));
    out.append("\t").append(std::to_string(s.token_count)).append("\n");
  }
  return out;
}

std::string RenderDistribution(const DistributionReport &report) {
  std::ostringstream out;
  out << "top " << report.rows.size() << " " << ToString(report.key) << " of "
      << report.total << "\n";
  for (const DistributionRow &row : report.rows) {
    out << std::left << std::setw(40) << row.label << std::right << std::setw(10)
        << row.count << std::setw(12) << FormatFraction(row.fraction) << "\n";
  }
  return out.str();
}

std::string RenderDistributionTsv(const DistributionReport &report) {
  std::string out;
  for (const DistributionRow &row : report.rows) {
    out.append(ToString(report.key)).append("\t");
    AppendEscaped(row.label, &out);
    out.append("\t").append(std::to_string(row.count));
    out.append("\t").append(FormatFraction(row.fraction)).append("\n");
  }
  return out;
}

}  // namespace snapkit
