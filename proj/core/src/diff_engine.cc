#include "snapkit/diff_engine.h"

#include <algorithm>
#include <optional>
#include <thread>

#include "snapkit/errors.h"
#include "snapkit/parallel.h"

namespace snapkit {
namespace {

void AppendJoined(const std::vector<std::string_view> &sentences, std::string *out) {
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out->push_back(' ');
    out->append(sentences[i]);
  }
}

void AppendContribution(const std::vector<std::string_view> &sentences, std::string *out) {
  if (sentences.empty()) return;
  if (!out->empty()) out->append("\n\n");
  AppendJoined(sentences, out);
}

}  // namespace

std::string GetDiff(const SegmentedArticle &prev, const SegmentedArticle &recent) {
  // sentence -> ascending indices of previous paragraphs containing it
  std::unordered_map<std::string_view, std::vector<int>> where;
  for (std::size_t pi = 0; pi < prev.paragraphs.size(); ++pi) {
    for (const std::string &s : prev.paragraphs[pi].sentences) {
      auto &indices = where[s];
      if (indices.empty() || indices.back() != static_cast<int>(pi)) {
        indices.push_back(static_cast<int>(pi));
      }
    }
  }

  std::string diff;
  std::vector<int> shared(prev.paragraphs.size(), 0);
  std::vector<int> touched;
  std::vector<std::string_view> distinct;
  std::vector<std::string_view> contribution;

  for (const Paragraph &paragraph : recent.paragraphs) {
    distinct.assign(paragraph.sentences.begin(), paragraph.sentences.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    touched.clear();
    for (std::string_view s : distinct) {
      auto it = where.find(s);
      if (it == where.end()) continue;
      for (int pi : it->second) {
        if (shared[pi]++ == 0) touched.push_back(pi);
      }
    }

    int best = -1;
    int best_count = 0;
    for (int pi : touched) {
      if (shared[pi] > best_count || (shared[pi] == best_count && pi < best)) {
        best = pi;
        best_count = shared[pi];
      }
    }
    for (int pi : touched) shared[pi] = 0;

    contribution.clear();
    if (best < 0) {
      contribution.assign(paragraph.sentences.begin(), paragraph.sentences.end());
    } else {
      for (const std::string &s : paragraph.sentences) {
        auto it = where.find(s);
        bool in_best = it != where.end() &&
                       std::binary_search(it->second.begin(), it->second.end(), best);
        if (!in_best) contribution.push_back(s);
      }
    }
    AppendContribution(contribution, &diff);
  }
  return diff;
}

std::string PrepareText(std::string_view raw, bool strip_markup) {
  if (strip_markup) return Normalize(StripMarkup(raw));
  return Normalize(raw);
}

DiffsetBuilder::DiffsetBuilder(SnapshotPair pair, DiffOptions options)
    : pair_(std::move(pair)), options_(options) {
  if (options_.splitter == nullptr) options_.splitter = &DefaultSplitter();
}

void DiffsetBuilder::AddPrevious(ArticleSnapshot article) {
  auto [it, inserted] =
      previous_.try_emplace(std::move(article.article_id), Previous{std::move(article.text)});
  if (!inserted) throw DuplicateArticle(it->first, pair_.prev_tag);
}

void DiffsetBuilder::AddRecent(std::span<const ArticleSnapshot> batch) {
  for (const ArticleSnapshot &a : batch) {
    if (!recent_ids_.insert(a.article_id).second) {
      throw DuplicateArticle(a.article_id, pair_.recent_tag);
    }
  }

  std::vector<std::optional<DiffsetEntry>> results(batch.size());
  ParallelFor(batch.size(), options_.workers, [&](std::size_t i) {
    const ArticleSnapshot &recent = batch[i];
    auto it = previous_.find(recent.article_id);
    if (it == previous_.end()) {
      results[i] = DiffsetEntry{recent.article_id, recent.title, EntryKind::kNewArticle,
                                PrepareText(recent.text, options_.strip_markup), pair_};
      return;
    }
    if (it->second.text == recent.text) return;
    const std::string prev_text = PrepareText(it->second.text, options_.strip_markup);
    const std::string recent_text = PrepareText(recent.text, options_.strip_markup);
    if (prev_text == recent_text) return;
    std::string diff = GetDiff(Segment(recent.article_id, prev_text, *options_.splitter),
                               Segment(recent.article_id, recent_text, *options_.splitter));
    if (diff.empty()) return;
    results[i] = DiffsetEntry{recent.article_id, recent.title, EntryKind::kUpdated,
                              std::move(diff), pair_};
  });

  for (auto &r : results) {
    if (r) entries_.push_back(std::move(*r));
  }
}

std::vector<DiffsetEntry> DiffsetBuilder::Finish() && {
  std::sort(entries_.begin(), entries_.end(),
            [](const DiffsetEntry &a, const DiffsetEntry &b) {
              return a.article_id < b.article_id;
            });
  return std::move(entries_);
}

std::vector<DiffsetEntry> BuildDiffset(std::span<const ArticleSnapshot> prev,
                                       std::span<const ArticleSnapshot> recent,
                                       const SnapshotPair &pair,
                                       const DiffOptions &options) {
  DiffsetBuilder builder(pair, options);
  for (const ArticleSnapshot &a : prev) builder.AddPrevious(a);
  builder.AddRecent(recent);
  return std::move(builder).Finish();
}

std::vector<DiffsetEntry> BuildDiffset(ArticleReader &prev, ArticleReader &recent,
                                       const SnapshotPair &pair,
                                       const DiffOptions &options) {
  DiffsetBuilder builder(pair, options);
  while (auto a = prev.Next()) builder.AddPrevious(std::move(*a));

  using Batch = std::vector<ArticleSnapshot>;
  BoundedQueue<Batch> queue(2);
  std::exception_ptr producer_error;
  std::jthread producer([&] {
    try {
      Batch batch;
      while (auto a = recent.Next()) {
        batch.push_back(std::move(*a));
        if (batch.size() >= options.batch_size) {
          if (!queue.Push(std::move(batch))) return;
          batch = Batch();
        }
      }
      if (!batch.empty()) queue.Push(std::move(batch));
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.Close();
  });

  try {
    while (auto batch = queue.Pop()) builder.AddRecent(*batch);
  } catch (...) {
    queue.Close();
    throw;
  }
  producer.join();
  if (producer_error) std::rethrow_exception(producer_error);
  return std::move(builder).Finish();
}

}  // namespace snapkit
