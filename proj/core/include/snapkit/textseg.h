#ifndef SNAPKIT_TEXTSEG_H_
#define SNAPKIT_TEXTSEG_H_

#include <string>
#include <string_view>
#include <vector>

namespace snapkit {

struct Paragraph {
  std::vector<std::string> sentences;
  int index = 0;

  bool operator==(const Paragraph &) const = default;
};

struct SegmentedArticle {
  std::string article_id;
  std::vector<Paragraph> paragraphs;

  // Paragraphs joined by a blank line, sentences by a single space.
  std::string Join() const;
};

// Canonical text form:
//  - NFC composition; ill-formed UTF-8 becomes U+FFFD
//  - CRLF and lone CR become LF
//  - runs of spaces/tabs collapse to one space; each line is trimmed
//  - line breaks inside a paragraph become a single space, paragraphs are
//    separated by exactly one blank line, no leading/trailing blank lines
// Idempotent.
std::string Normalize(std::string_view text);

// Splits on runs of blank lines, dropping empty paragraphs.
std::vector<std::string> SplitParagraphs(std::string_view text);

// Pluggable sentence segmenter. Implementations must return non-empty
// sentences that rejoin with single spaces into the input paragraph.
class SentenceSplitter {
 public:
  virtual ~SentenceSplitter() = default;
  virtual std::vector<std::string> Split(std::string_view paragraph) const = 0;
};

// Boundary after '.', '!' or '?' (plus any closing quotes or brackets) when
// followed by a space and then an uppercase letter or opening quote/bracket.
// No boundary after single-letter initials or after Mr. Dr. St. No. vs. etc.
// e.g. i.e.
class RuleBasedSplitter : public SentenceSplitter {
 public:
  std::vector<std::string> Split(std::string_view paragraph) const override;
};

const SentenceSplitter &DefaultSplitter();

std::vector<std::string> SplitSentences(std::string_view paragraph);

// Segments already-normalized text.
SegmentedArticle Segment(std::string article_id, std::string_view normalized,
                         const SentenceSplitter &splitter = DefaultSplitter());

// Optional wiki-markup pass: drops {{templates}} (nested), rewrites
// [[target|anchor]] to its anchor and [[target]] to its target, and strips
// heading markers (== Heading == -> Heading).
std::string StripMarkup(std::string_view text);

// Unicode case folding; used for case-insensitive containment checks.
std::string FoldCase(std::string_view text);

}  // namespace snapkit

#endif  // SNAPKIT_TEXTSEG_H_
