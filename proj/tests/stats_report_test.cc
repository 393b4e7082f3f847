#include "snapkit/stats_report.h"

#include <gtest/gtest.h>

#include <cmath>
#include <unordered_map>

#include "snapkit/errors.h"
#include "test_support.h"

namespace snapkit {
namespace {

using testing::MakeProbe;

TEST(CorpusStatsTest, EmptyAndSingle) {
  EXPECT_EQ(ComputeCorpusStats(std::vector<DiffsetEntry>{}, "d"), (CorpusStats{"d", 0, 0}));
  std::vector<DiffsetEntry> one = {{"1", "t", EntryKind::kNewArticle, "a b c", {}}};
  EXPECT_EQ(ComputeCorpusStats(one, "d"), (CorpusStats{"d", 1, 3}));
}

TEST(CorpusStatsTest, MatchesLineCountingOracle) {
  testing::TextGen gen(307);
  std::vector<DiffsetEntry> entries;
  std::size_t expected_tokens = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = gen.RenderNoisy(gen.Article(3));
    entries.push_back({std::to_string(i), "t", EntryKind::kUpdated, text, {}});
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) expected_tokens += testing::OracleWords(line);
  }
  const CorpusStats s = ComputeCorpusStats(entries, "x");
  EXPECT_EQ(s.article_count, 1000u);
  EXPECT_EQ(s.token_count, expected_tokens);
}

TEST(CorpusStatsTest, AdditiveOverPartitions) {
  testing::TextGen gen(311);
  std::vector<ArticleSnapshot> articles;
  for (int i = 0; i < 400; ++i) articles.push_back({std::to_string(i), "t", gen.RenderNoisy(gen.Article()), ""});
  const CorpusStats whole = ComputeCorpusStats(articles, "x");
  CorpusStats parts{"x", 0, 0};
  for (std::size_t cut = 0; cut < articles.size(); cut += 37) {
    const std::size_t end = std::min(articles.size(), cut + 37);
    parts += ComputeCorpusStats(std::span(articles).subspan(cut, end - cut), "x");
  }
  EXPECT_EQ(parts, whole);
}

TEST(FunnelTest, AllZeroReport) {
  const std::string text = RenderFunnel(FilterReport{});
  EXPECT_NE(text.find("Initial Categorization"), std::string::npos);
  std::size_t headline_cells = 0;
  for (std::size_t at = text.find("0 C 0"); at != std::string::npos; at = text.find("0 C 0", at + 1)) {
    ++headline_cells;
  }
  EXPECT_EQ(headline_cells, 3u) << text;
  const std::string rows = RenderFunnelTsv(FilterReport{});
  std::istringstream lines(rows);
  std::string line;
  while (std::getline(lines, line)) EXPECT_EQ(line.substr(line.rfind('\t') + 1), "0") << line;
  std::istringstream tsv(rows);
  EXPECT_EQ(ParseFunnelTsv(tsv), FilterReport{});
}

TEST(FunnelTest, NonMonotoneReportIsRejected) {
  FilterReport r;
  r.categorized = {10, 10};
  r.input = {5, 10};
  r.after_alignment = {6, 2};
  EXPECT_THROW(RenderFunnel(r), RenderError);
}

TEST(FunnelTest, TsvRoundTrip) {
  FilterReport r;
  r.categorized = {800, 100};
  r.input = {9, 100};
  r.after_alignment = {7, 60};
  r.after_rule1 = {7, 55};
  r.after_rule2 = {6, 50};
  r.after_rule3 = {5, 40};
  r.dropped_unmapped = 10;
  r.dropped_missing_article = 20;
  r.dropped_object_absent = 12;
  const std::string tsv = RenderFunnelTsv(r);
  EXPECT_NE(tsv.find("rule3_frequency\tChanged\t40\n"), std::string::npos);
  std::istringstream in(tsv);
  EXPECT_EQ(ParseFunnelTsv(in), r);
  const std::string text = RenderFunnel(r);
  EXPECT_NE(text.find("Heuristic Filtering"), std::string::npos);
}

TEST(DistributionTest, SingleInstance) {
  std::vector<ProbeInstance> v = {MakeProbe("Rome", "country", "Italy")};
  auto d = Distribution(v, DistributionKey::kRelation);
  ASSERT_EQ(d.rows.size(), 1u);
  EXPECT_EQ(d.rows[0], (DistributionRow{"country", 1, 1.0}));
}

TEST(DistributionTest, UniformTiesInLexicographicOrder) {
  std::vector<ProbeInstance> v;
  for (int label = 9; label >= 0; --label) {
    for (int k = 0; k < 10; ++k) v.push_back(MakeProbe("s", "rel" + std::to_string(label), "o"));
  }
  auto d = Distribution(v, DistributionKey::kRelation, 5);
  ASSERT_EQ(d.rows.size(), 5u);
  EXPECT_EQ(d.total, 100u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(d.rows[i].label, "rel" + std::to_string(i));
    EXPECT_DOUBLE_EQ(d.rows[i].fraction, 0.1);
  }
}

TEST(DistributionTest, ZipfCountsMatchHashOracle) {
  std::mt19937_64 rng(313);
  std::vector<double> weights;
  for (int k = 1; k <= 200; ++k) weights.push_back(1.0 / k);
  std::discrete_distribution<int> zipf(weights.begin(), weights.end());
  std::vector<ProbeInstance> v;
  std::unordered_map<std::string, std::size_t> oracle;
  for (int i = 0; i < 20000; ++i) {
    const std::string label = "E" + std::to_string(zipf(rng));
    v.push_back(MakeProbe(label, "r", "o" + std::to_string(i)));
    ++oracle[label];
  }
  auto d = Distribution(v, DistributionKey::kSubjectEntity, 1000);
  ASSERT_EQ(d.rows.size(), oracle.size());
  for (const auto &row : d.rows) {
    EXPECT_EQ(row.count, oracle[row.label]) << row.label;
    EXPECT_DOUBLE_EQ(row.fraction, static_cast<double>(row.count) / 20000.0);
  }
  for (std::size_t i = 1; i < d.rows.size(); ++i) {
    const auto &a = d.rows[i - 1];
    const auto &b = d.rows[i];
    EXPECT_TRUE(a.count > b.count || (a.count == b.count && a.label < b.label));
  }
  EXPECT_EQ(Distribution(v, DistributionKey::kSubjectEntity, 30).rows.size(), 30u);
}

TEST(DistributionTest, TypeMappingByIdThenLabel) {
  std::istringstream types("Q220\tcity\nItaly\tcountry\n");
  const TypeMapping t = ReadTypeMapping(types);
  ProbeInstance with_id = MakeProbe("Rome", "country", "Italy");
  with_id.triple.subject_id = "Q220";
  std::vector<ProbeInstance> v = {with_id, MakeProbe("Oslo", "country", "Norway")};
  auto subjects = Distribution(v, DistributionKey::kSubjectEntity, 30, &t);
  ASSERT_EQ(subjects.rows.size(), 2u);
  EXPECT_EQ(subjects.rows[0].label, "city");
  EXPECT_EQ(subjects.rows[1].label, "unknown");
  auto objects = Distribution(v, DistributionKey::kObjectEntity, 30, &t);
  EXPECT_EQ(objects.rows[0].label, "country");
}

TEST(RenderTest, CorpusAndDistributionTsv) {
  std::vector<CorpusStats> stats = {{"2021-08", 3, 40}, {"2021-08..2021-09", 1, 7}};
  EXPECT_EQ(RenderCorpusStatsTsv(stats), "2021-08\t3\t40\n2021-08..2021-09\t1\t7\n");
  EXPECT_NE(RenderCorpusStats(stats).find("2021-08..2021-09"), std::string::npos);
  std::vector<ProbeInstance> v = {MakeProbe("a", "r1", "x"), MakeProbe("b", "r1", "y"),
                                  MakeProbe("c", "r2", "z")};
  auto d = Distribution(v, DistributionKey::kRelation);
  EXPECT_EQ(RenderDistributionTsv(d), "relation\tr1\t2\t0.666667\nrelation\tr2\t1\t0.333333\n");
}

}  // namespace
}  // namespace snapkit
