#include "snapkit/textseg.h"

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "snapkit/escape.h"

namespace snapkit {
namespace {

bool IsAscii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string ToNfc(std::string_view text) {
  if (IsAscii(text)) return std::string(text);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error(u_errorName(status));
  std::string out;
  out.reserve(text.size());
  icu::StringByteSink<std::string> sink(&out);
  nfc->normalizeUTF8(0, icu::StringPiece(text.data(), static_cast<int32_t>(text.size())),
                     sink, nullptr, status);
  if (U_FAILURE(status)) throw std::runtime_error(u_errorName(status));
  return out;
}

// Appends `line` with space/tab runs collapsed and both ends trimmed.
void AppendCollapsed(std::string_view line, std::string *out) {
  bool pending_space = false;
  bool wrote = false;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      pending_space = wrote;
      continue;
    }
    if (pending_space) out->push_back(' ');
    pending_space = false;
    out->push_back(c);
    wrote = true;
  }
}

bool IsBlankLine(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

constexpr std::array<std::string_view, 8> kAbbreviations = {
    "Mr.", "Dr.", "St.", "No.", "vs.", "etc.", "e.g.", "i.e."};

bool IsOpeningAscii(char c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{';
}

bool IsOpeningCodePoint(UChar32 cp) {
  switch (cp) {
    case 0x201C:  // “
    case 0x2018:  // ‘
    case 0x00AB:  // «
    case 0x00BF:  // ¿
    case 0x00A1:  // ¡
      return true;
    default:
      return false;
  }
}

bool StartsSentence(std::string_view s) {
  if (s.empty()) return false;
  if (IsOpeningAscii(s[0])) return true;
  int32_t i = 0;
  UChar32 cp = 0;
  U8_NEXT(reinterpret_cast<const uint8_t *>(s.data()), i,
          static_cast<int32_t>(s.size()), cp);
  if (cp < 0) return false;
  return u_isupper(cp) || u_istitle(cp) || IsOpeningCodePoint(cp);
}

// Length of the run of closing quotes and brackets starting at `pos`.
std::size_t ClosersAt(std::string_view s, std::size_t pos) {
  static constexpr std::string_view kMultiByte[] = {"\u201D", "\u2019", "\u00BB"};
  std::size_t n = 0;
  while (pos + n < s.size()) {
    const char c = s[pos + n];
    if (c == '"' || c == '\'' || c == ')' || c == ']') {
      ++n;
      continue;
    }
    bool matched = false;
    for (std::string_view closer : kMultiByte) {
      if (s.substr(pos + n).starts_with(closer)) {
        n += closer.size();
        matched = true;
        break;
      }
    }
    if (!matched) break;
  }
  return n;
}

// The whitespace-delimited token ending at `end` (inclusive) is an
// abbreviation or a single-letter initial.
bool IsGuarded(std::string_view paragraph, std::size_t end) {
  std::size_t start = paragraph.rfind(' ', end);
  start = start == std::string_view::npos ? 0 : start + 1;
  std::string_view token = paragraph.substr(start, end - start + 1);
  while (!token.empty() && IsOpeningAscii(token.front())) token.remove_prefix(1);
  for (auto abbr : kAbbreviations) {
    if (token == abbr) return true;
  }
  // Single letter followed by '.', e.g. the "J." in "J. Smith".
  std::string_view body = token.substr(0, token.size() - 1);
  if (body.empty()) return false;
  int32_t i = 0;
  UChar32 cp = 0;
  U8_NEXT(reinterpret_cast<const uint8_t *>(body.data()), i,
          static_cast<int32_t>(body.size()), cp);
  return cp >= 0 && i == static_cast<int32_t>(body.size()) && u_isalpha(cp);
}

// Finds the index of `close` matching the opener at `open`, honoring nesting.
std::size_t FindClosing(std::string_view s, std::size_t open, std::string_view opener,
                        std::string_view closer) {
  int depth = 0;
  std::size_t i = open;
  while (i + 1 < s.size()) {
    if (s.compare(i, opener.size(), opener) == 0) {
      ++depth;
      i += opener.size();
    } else if (s.compare(i, closer.size(), closer) == 0) {
      if (--depth == 0) return i;
      i += closer.size();
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

std::string StripTemplates(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "{{") == 0) {
      std::size_t close = FindClosing(s, i, "{{", "}}");
      if (close != std::string_view::npos) {
        i = close + 2;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string StripLinks(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "[[") == 0) {
      std::size_t close = FindClosing(s, i, "[[", "]]");
      if (close != std::string_view::npos) {
        std::string inner = StripLinks(s.substr(i + 2, close - i - 2));
        std::size_t bar = inner.rfind('|');
        out.append(bar == std::string::npos ? inner : inner.substr(bar + 1));
        i = close + 2;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string_view StripHeading(std::string_view line) {
  std::string_view t = line;
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) {
    t.remove_suffix(1);
  }
  std::size_t lead = t.find_first_not_of('=');
  if (lead == 0 || lead == std::string_view::npos) return line;
  std::size_t trail = t.size() - 1 - t.find_last_not_of('=');
  if (trail != lead) return line;
  std::string_view inner = t.substr(lead, t.size() - 2 * lead);
  std::size_t b = inner.find_first_not_of(" \t");
  if (b == std::string_view::npos) return line;
  std::size_t e = inner.find_last_not_of(" \t");
  return inner.substr(b, e - b + 1);
}

}  // namespace

std::string Normalize(std::string_view text) {
  const std::string composed = ToNfc(SanitizeUtf8(text));
  std::string_view rest = composed;

  std::string out;
  out.reserve(composed.size());
  bool in_paragraph = false;  // a line has been written to the current paragraph
  bool need_break = false;    // a blank line separates us from the last paragraph

  while (!rest.empty()) {
    std::size_t eol = rest.find_first_of("\r\n");
    std::string_view line = rest.substr(0, eol);
    if (eol == std::string_view::npos) {
      rest = {};
    } else {
      std::size_t skip = (rest[eol] == '\r' && eol + 1 < rest.size() && rest[eol + 1] == '\n') ? 2 : 1;
      rest.remove_prefix(eol + skip);
    }

    if (IsBlankLine(line)) {
      if (in_paragraph) need_break = true;
      in_paragraph = false;
      continue;
    }
    if (in_paragraph) {
      out.push_back(' ');
    } else if (need_break) {
      out.append("\n\n");
      need_break = false;
    }
    AppendCollapsed(line, &out);
    in_paragraph = true;
  }
  return out;
}

std::vector<std::string> SplitParagraphs(std::string_view text) {
  std::vector<std::string> paragraphs;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) paragraphs.push_back(std::move(current));
    current.clear();
  };
  while (!text.empty()) {
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (IsBlankLine(line)) {
      flush();
      continue;
    }
    if (!current.empty()) current.push_back('\n');
    current.append(line);
  }
  flush();
  return paragraphs;
}

std::vector<std::string> RuleBasedSplitter::Split(std::string_view paragraph) const {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 2 < paragraph.size(); ++i) {
    char c = paragraph[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const std::size_t end = i + 1 + ClosersAt(paragraph, i + 1);
    if (end + 1 >= paragraph.size() || paragraph[end] != ' ') continue;
    if (!StartsSentence(paragraph.substr(end + 1))) continue;
    if (c == '.' && IsGuarded(paragraph, i)) continue;
    if (end > start) sentences.emplace_back(paragraph.substr(start, end - start));
    start = end + 1;
  }
  if (start < paragraph.size()) sentences.emplace_back(paragraph.substr(start));
  return sentences;
}

const SentenceSplitter &DefaultSplitter() {
  static const RuleBasedSplitter splitter;
  return splitter;
}

std::vector<std::string> SplitSentences(std::string_view paragraph) {
  return DefaultSplitter().Split(paragraph);
}

SegmentedArticle Segment(std::string article_id, std::string_view normalized,
                         const SentenceSplitter &splitter) {
  SegmentedArticle article{std::move(article_id), {}};
  int index = 0;
  for (const std::string &p : SplitParagraphs(normalized)) {
    article.paragraphs.push_back({splitter.Split(p), index++});
  }
  return article;
}

std::string SegmentedArticle::Join() const {
  std::string out;
  for (const Paragraph &p : paragraphs) {
    if (!out.empty()) out.append("\n\n");
    for (std::size_t i = 0; i < p.sentences.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out.append(p.sentences[i]);
    }
  }
  return out;
}

std::string StripMarkup(std::string_view text) {
  std::string stripped = StripLinks(StripTemplates(text));
  std::string out;
  out.reserve(stripped.size());
  std::string_view rest = stripped;
  while (true) {
    std::size_t eol = rest.find('\n');
    out.append(StripHeading(rest.substr(0, eol)));
    if (eol == std::string_view::npos) break;
    out.push_back('\n');
    rest.remove_prefix(eol + 1);
  }
  return out;
}

std::string FoldCase(std::string_view text) {
  if (IsAscii(text)) {
    std::string out(text);
    for (char &c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  std::string out;
  icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())))
      .foldCase()
      .toUTF8String(out);
  return out;
}

}  // namespace snapkit
