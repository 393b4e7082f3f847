#ifndef SNAPKIT_DIFF_ENGINE_H_
#define SNAPKIT_DIFF_ENGINE_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "snapkit/ingest.h"
#include "snapkit/textseg.h"
#include "snapkit/types.h"

namespace snapkit {

// New and updated text of `recent` relative to `prev`.
//
// For each recent paragraph, in order:
//  - shares no sentence with any previous paragraph: the whole paragraph;
//  - otherwise, against the previous paragraph sharing the most distinct
//    sentences (lowest index on ties): the sentences absent from it, in
//    order, or nothing if there are none.
// Contributions are separated by a blank line, sentences by one space.
std::string GetDiff(const SegmentedArticle &prev, const SegmentedArticle &recent);

struct DiffOptions {
  int workers = 1;
  bool strip_markup = false;
  // Recent articles handed to workers at a time when streaming.
  std::size_t batch_size = 2048;
  const SentenceSplitter *splitter = &DefaultSplitter();
};

// Optional markup stripping followed by Normalize.
std::string PrepareText(std::string_view raw, bool strip_markup);

// Incremental diffset construction: load the whole previous snapshot, then
// feed recent articles in batches. The previous index is read-only once the
// first batch arrives.
class DiffsetBuilder {
 public:
  DiffsetBuilder(SnapshotPair pair, DiffOptions options);

  // Throws DuplicateArticle on a repeated id.
  void AddPrevious(ArticleSnapshot article);

  // Diffs one batch on the configured worker count. Throws DuplicateArticle
  // if an id was already seen in the recent snapshot.
  void AddRecent(std::span<const ArticleSnapshot> batch);

  // Entries sorted by article_id (byte order).
  std::vector<DiffsetEntry> Finish() &&;

  std::size_t previous_count() const { return previous_.size(); }
  std::size_t recent_count() const { return recent_ids_.size(); }

 private:
  struct Previous {
    std::string text;
  };

  SnapshotPair pair_;
  DiffOptions options_;
  std::unordered_map<std::string, Previous> previous_;
  std::unordered_set<std::string> recent_ids_;
  std::vector<DiffsetEntry> entries_;
};

std::vector<DiffsetEntry> BuildDiffset(std::span<const ArticleSnapshot> prev,
                                       std::span<const ArticleSnapshot> recent,
                                       const SnapshotPair &pair,
                                       const DiffOptions &options = {});

// Streaming form: recent articles are read on a producer thread into a
// bounded queue of batches.
std::vector<DiffsetEntry> BuildDiffset(ArticleReader &prev, ArticleReader &recent,
                                       const SnapshotPair &pair,
                                       const DiffOptions &options = {});

}  // namespace snapkit

#endif  // SNAPKIT_DIFF_ENGINE_H_
