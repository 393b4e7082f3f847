#include "snapkit/probe_qc.h"

#include <gtest/gtest.h>

#include <cmath>

#include "snapkit/errors.h"
#include "snapkit/ingest.h"
#include "snapkit/textseg.h"
#include "test_support.h"

namespace snapkit {
namespace {

using testing::MakeProbe;

CategorizedFact Fact(std::string subject_id, std::string subject, std::string relation,
                     std::string object, Category c) {
  CategorizedFact f;
  f.triple = {std::move(subject_id), std::move(subject), "P:" + relation, relation, "",
              std::move(object), ""};
  f.category = c;
  f.reason = c == Category::kUnchanged ? ChangeReason::kSame : ChangeReason::kNewRelation;
  return f;
}

TEST(AlignTest, ChangedFactFoundInDiffsetText) {
  EntityMapping mapping;
  mapping.Insert({"100", "Carlo Alighiero", "Q1"});
  ArticleTextIndex diffset, full;
  diffset.Add("100", "Carlo Alighiero died in Rome on 11 September 2021");
  std::vector<CategorizedFact> facts = {
      Fact("Q1", "Carlo Alighiero", "place of death", "Rome", Category::kChanged)};
  AlignmentDrops drops;
  auto out = Align(facts, mapping, diffset, full, {}, &drops);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].aligned_article_id, "100");
  EXPECT_EQ(out[0].aligned_kind, AlignedKind::kDiffsetText);
  EXPECT_EQ(out[0].serialized, "Carlo Alighiero place of death Rome");
  EXPECT_EQ(drops.unmapped + drops.missing_article + drops.object_absent, 0u);
}

TEST(AlignTest, DropReasons) {
  EntityMapping mapping;
  mapping.Insert({"1", "A", "Q1"});
  mapping.Insert({"2", "B", "Q2"});
  ArticleTextIndex diffset, full;
  diffset.Add("1", "B was born in Paris.");
  full.Add("1", "A lives in Lyon.");
  std::vector<CategorizedFact> facts = {
      Fact("Q9", "Z", "r", "Paris", Category::kChanged),      // unmapped
      Fact("Q2", "B", "r", "Paris", Category::kChanged),      // no diffset entry for 2
      Fact("Q2", "B", "r", "Paris", Category::kUnchanged),    // no recent article 2
      Fact("Q1", "A", "r", "Lyon", Category::kChanged),       // not in the diff text
      Fact("Q1", "A", "r", "Paris", Category::kUnchanged),    // not in the full text
      Fact("Q1", "A", "r", "Lyon", Category::kUnchanged),     // kept
  };
  AlignmentDrops drops;
  auto out = Align(facts, mapping, diffset, full, {}, &drops);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].aligned_kind, AlignedKind::kFullArticleText);
  EXPECT_EQ(drops.unmapped, 1u);
  EXPECT_EQ(drops.missing_article, 2u);
  EXPECT_EQ(drops.object_absent, 2u);
}

TEST(AlignTest, CaseInsensitiveOption) {
  EntityMapping mapping;
  mapping.Insert({"1", "A", "Q1"});
  ArticleTextIndex diffset, full;
  diffset.Add("1", "She joined the new york knicks.");
  std::vector<CategorizedFact> facts = {Fact("Q1", "A", "r", "New York", Category::kChanged)};
  EXPECT_TRUE(Align(facts, mapping, diffset, full).empty());
  QcOptions opts;
  opts.case_insensitive = true;
  EXPECT_EQ(Align(facts, mapping, diffset, full, opts).size(), 1u);
}

// Naive search: no std::string::find, no indexes.
bool NaiveContains(const std::string &hay, const std::string &needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    std::size_t k = 0;
    while (k < needle.size() && hay[i + k] == needle[k]) ++k;
    if (k == needle.size()) return true;
  }
  return false;
}

TEST(AlignTest, MatchesExhaustiveSubstringOracle) {
  testing::TextGen gen(211);
  std::vector<std::pair<std::string, std::string>> diff_articles, full_articles;
  std::vector<MappingEntry> entries;
  EntityMapping mapping;
  ArticleTextIndex diffset, full;
  for (int i = 0; i < 300; ++i) {
    const std::string id = "a" + std::to_string(i);
    const std::string entity = "Q" + std::to_string(i);
    entries.push_back({id, "t", entity});
    mapping.Insert(entries.back());
    const std::string f = testing::Render(gen.Article(3));
    full_articles.push_back({id, f});
    full.Add(id, f);
    if (i % 3 != 0) {
      const std::string d = testing::Render(gen.Article(2));
      diff_articles.push_back({id, d});
      diffset.Add(id, d);
    }
  }
  std::vector<CategorizedFact> facts;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t who = gen.Uniform(0, 330);  // some subjects unmapped
    const Category c = gen.Chance(0.5) ? Category::kChanged : Category::kUnchanged;
    std::string object = gen.Word();
    if (who < 300 && gen.Chance(0.6)) {
      const std::string own = "a" + std::to_string(who);
      const bool use_diff = c == Category::kChanged && who % 3 != 0;
      const std::string &text = use_diff ? *diffset.Find(own) : *full.Find(own);
      const std::size_t start = gen.Uniform(0, text.size() - 1);
      object = text.substr(start, gen.Uniform(1, 12));
    }
    facts.push_back(Fact("Q" + std::to_string(who), "S", "r", object, c));
  }

  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const auto &f = facts[i];
    const MappingEntry *entry = nullptr;
    for (const auto &e : entries) {
      if (e.entity_id == f.triple.subject_id) entry = &e;
    }
    if (!entry) continue;
    const auto &pool = f.category == Category::kChanged ? diff_articles : full_articles;
    for (const auto &[id, text] : pool) {
      if (id == entry->article_id && NaiveContains(text, Normalize(f.triple.object_label))) {
        expected.push_back(i);
      }
    }
  }
  QcOptions opts;
  opts.workers = 4;
  auto out = Align(facts, mapping, diffset, full, opts);
  ASSERT_EQ(out.size(), expected.size());
  for (std::size_t k = 0; k < out.size(); ++k) EXPECT_EQ(out[k].triple, facts[expected[k]].triple);
  EXPECT_GT(expected.size(), 200u);
}

TEST(FilterSubstringTest, Examples) {
  auto out = FilterSubstring({MakeProbe("New York", "part of", "New York City"),
                              MakeProbe("Rome", "country", "Italy"),
                              MakeProbe("Shang-Chi and the Legend of the Ten Rings", "title", "Shang-Chi")});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].triple.subject_label, "Rome");
}

TEST(FilterSubstringTest, CaseInsensitiveOption) {
  std::vector<ProbeInstance> in = {MakeProbe("Paris", "named after", "paris")};
  EXPECT_EQ(FilterSubstring(in).size(), 1u);
  EXPECT_TRUE(FilterSubstring(in, true).empty());
}

TEST(FilterSubstringTest, MatchesContainmentOracle) {
  testing::TextGen gen(223);
  std::vector<ProbeInstance> in;
  for (int i = 0; i < 3000; ++i) {
    std::string s = gen.Word() + " " + gen.Word();
    std::string o = gen.Word();
    switch (gen.Uniform(0, 3)) {
      case 0: o = s.substr(gen.Uniform(0, 2), gen.Uniform(2, 5)); break;
      case 1: o = gen.Word() + " " + s; break;
      default: break;
    }
    in.push_back(MakeProbe(s, "r", o));
  }
  auto out = FilterSubstring(in);
  std::size_t k = 0;
  for (const auto &p : in) {
    const auto &s = p.triple.subject_label;
    const auto &o = p.triple.object_label;
    const bool contained = NaiveContains(s, o) || NaiveContains(o, s);
    if (!contained) {
      ASSERT_LT(k, out.size());
      EXPECT_EQ(out[k++].triple, p.triple);
    }
  }
  EXPECT_EQ(k, out.size());
}

TEST(FilterObjectLengthTest, Boundaries) {
  auto out = FilterObjectLength({MakeProbe("Mario Chalmers", "team", "Indios de Mayag\xC3\xBC" "ez"),
                                 MakeProbe("s", "r", "one two three four five"),
                                 MakeProbe("s", "r", "one two three four five six"),
                                 MakeProbe("s", "r", "  one\ttwo  three four five  ")});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[1].triple.object_label, "one two three four five");
}

TEST(FilterObjectLengthTest, WordCountMatchesStreamOracle) {
  testing::TextGen gen(227);
  const std::string seps[] = {" ", "  ", "\t", " \n "};
  for (int i = 0; i < 1000; ++i) {
    std::string s = gen.Chance(0.2) ? " " : "";
    const auto n = gen.Uniform(0, 9);
    for (std::size_t w = 0; w < n; ++w) s += gen.Word() + seps[gen.Uniform(0, 3)];
    EXPECT_EQ(CountWords(s), testing::OracleWords(s)) << s;
  }
}

TEST(FrequencyCapTest, Arithmetic) {
  EXPECT_EQ(FrequencyCap(0.01, 1000), 10u);
  EXPECT_EQ(FrequencyCap(0.05, 1000), 50u);
  EXPECT_EQ(FrequencyCap(0.01, 99), 1u);
  EXPECT_EQ(FrequencyCap(0.01, 0), 1u);
  EXPECT_EQ(FrequencyCap(0.05, 39), 1u);
  EXPECT_EQ(FrequencyCap(0.05, 40), 2u);
}

TEST(FilterFrequencyTest, SubjectCapOnThousand) {
  std::vector<ProbeInstance> in;
  for (int i = 0; i < 15; ++i) in.push_back(MakeProbe("Popular", "r" + std::to_string(i), "o" + std::to_string(i)));
  for (int i = 0; i < 985; ++i) {
    in.push_back(MakeProbe("s" + std::to_string(i), "r" + std::to_string(i % 40), "o" + std::to_string(1000 + i)));
  }
  auto out = FilterFrequency(in);
  std::size_t popular = 0;
  for (const auto &p : out) popular += p.triple.subject_label == "Popular";
  EXPECT_EQ(popular, 10u);
}

TEST(FilterFrequencyTest, DistinctInstancesAllKept) {
  std::vector<ProbeInstance> in;
  for (int i = 0; i < 500; ++i) {
    const std::string k = std::to_string(i);
    in.push_back(MakeProbe("s" + k, "r" + k, "o" + k));
  }
  EXPECT_EQ(FilterFrequency(in).size(), 500u);
  EXPECT_TRUE(FilterFrequency({}).empty());
}

TEST(FilterFrequencyTest, MatchesGreedyOracle) {
  testing::TextGen gen(229);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = gen.Uniform(1, 3000);
    const std::size_t subjects = gen.Uniform(1, 400);
    const std::size_t objects = gen.Uniform(1, 200);
    const std::size_t relations = gen.Uniform(1, 60);
    std::vector<ProbeInstance> in;
    for (std::size_t i = 0; i < n; ++i) {
      // Skewed draws: square a uniform variate to concentrate on low labels.
      auto skew = [&](std::size_t m) {
        const double u = static_cast<double>(gen.Uniform(0, 1000000)) / 1000000.0;
        return static_cast<std::size_t>(u * u * static_cast<double>(m - 1));
      };
      in.push_back(MakeProbe("s" + std::to_string(skew(subjects)), "r" + std::to_string(skew(relations)),
                             "o" + std::to_string(skew(objects)) + "#" + std::to_string(i % 3)));
    }
    const CapFractions caps{0.01, 0.05, 0.05};
    auto out = FilterFrequency(in, caps);
    auto expected = testing::OracleFrequency(in, caps.subject, caps.object, caps.relation);
    ASSERT_EQ(out.size(), expected.size()) << trial;
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i].triple, expected[i].triple);
  }
}

std::vector<CategorizedFact> Unchanged(std::size_t n) {
  std::vector<CategorizedFact> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i].triple.subject_id = "Q" + std::to_string(i);
    v[i].category = Category::kUnchanged;
  }
  return v;
}

TEST(SampleUnchangedTest, RateOneIsIdentity) {
  auto in = Unchanged(1000);
  in[3].category = Category::kChanged;
  EXPECT_EQ(SampleUnchanged(in, 1.0, 5), in);
}

TEST(SampleUnchangedTest, SameSeedSameSubset) {
  auto in = Unchanged(5000);
  auto a = SampleUnchanged(in, 0.5, 99);
  EXPECT_EQ(a, SampleUnchanged(in, 0.5, 99));
  EXPECT_NE(a, SampleUnchanged(in, 0.5, 100));
}

TEST(SampleUnchangedTest, ChangedFactsAlwaysKept) {
  auto in = Unchanged(2000);
  for (std::size_t i = 0; i < in.size(); i += 2) in[i].category = Category::kChanged;
  auto out = SampleUnchanged(in, 0.01, 1);
  EXPECT_EQ(CountByCategory(out).changed, 1000u);
}

TEST(SampleUnchangedTest, BinomialBoundAtOneInThousand) {
  auto out = SampleUnchanged(Unchanged(1000000), 0.001, 2021);
  // n p = 1000, sigma = sqrt(n p (1 - p)) ~ 31.6
  const double sigma = std::sqrt(1e6 * 0.001 * 0.999);
  EXPECT_NEAR(static_cast<double>(out.size()), 1000.0, 3.0 * sigma);
}

TEST(SampleUnchangedTest, InvalidRates) {
  EXPECT_THROW(SampleUnchanged({}, 0.0, 1), InvalidRate);
  EXPECT_THROW(SampleUnchanged({}, 1.5, 1), InvalidRate);
  EXPECT_THROW(SampleUnchanged({}, -0.1, 1), InvalidRate);
  EXPECT_THROW(SampleUnchanged({}, std::nan(""), 1), InvalidRate);
}

TEST(RunQualityControlTest, ReportCountsEveryStage) {
  EntityMapping mapping;
  mapping.Insert({"1", "Alpha", "Q1"});
  mapping.Insert({"2", "Beta", "Q2"});
  ArticleTextIndex diffset, full;
  diffset.Add("1", "Alpha moved to Oslo in May.");
  full.Add("1", "Alpha moved to Oslo in May. Alpha speaks Norwegian.");
  full.Add("2", "Beta is a port in Chile near Alpha Town.");
  std::vector<CategorizedFact> facts = {
      Fact("Q1", "Alpha", "residence", "Oslo", Category::kChanged),
      Fact("Q1", "Alpha", "spoken", "Norwegian", Category::kUnchanged),
      Fact("Q2", "Beta", "country", "Chile", Category::kUnchanged),
      Fact("Q2", "Beta", "near", "Alpha Town", Category::kUnchanged),
      Fact("Q1", "Alpha", "moved", "Alpha moved to Oslo in May.", Category::kChanged),
      Fact("Q3", "Gamma", "x", "y", Category::kChanged),
  };
  auto result = RunQualityControl(facts, mapping, diffset, full, 1.0, 0);
  const FilterReport &r = result.report;
  EXPECT_EQ(r.categorized, (StageCounts{3, 3}));
  EXPECT_EQ(r.input, (StageCounts{3, 3}));
  EXPECT_EQ(r.after_alignment, (StageCounts{3, 2}));
  EXPECT_EQ(r.after_rule1, (StageCounts{3, 1}));
  EXPECT_EQ(r.after_rule2, (StageCounts{3, 1}));
  // N = 4, every cap is 1: the second Alpha fact and the second Beta fact go.
  EXPECT_EQ(r.after_rule3, (StageCounts{1, 1}));
  EXPECT_EQ(r.dropped_unmapped, 1u);
  EXPECT_TRUE(r.IsMonotone());
  ASSERT_EQ(result.probes.size(), 2u);
  EXPECT_EQ(result.probes[0].triple.object_label, "Oslo");
  EXPECT_EQ(result.probes[1].triple.object_label, "Chile");
}

}  // namespace
}  // namespace snapkit
