#include "snapkit/escape.h"

namespace snapkit {

namespace {

// Number of continuation bytes for a lead byte, or -1 if it cannot start a
// sequence.
int ContinuationCount(unsigned char lead) {
  if (lead < 0x80) return 0;
  if (lead >= 0xC2 && lead <= 0xDF) return 1;
  if (lead >= 0xE0 && lead <= 0xEF) return 2;
  if (lead >= 0xF0 && lead <= 0xF4) return 3;
  return -1;
}

// Valid range for the first continuation byte; excludes overlongs,
// surrogates and code points above U+10FFFF.
bool FirstContinuationOk(unsigned char lead, unsigned char b) {
  switch (lead) {
    case 0xE0: return b >= 0xA0 && b <= 0xBF;
    case 0xED: return b >= 0x80 && b <= 0x9F;
    case 0xF0: return b >= 0x90 && b <= 0xBF;
    case 0xF4: return b >= 0x80 && b <= 0x8F;
    default: return b >= 0x80 && b <= 0xBF;
  }
}

bool IsContinuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Length of the well-formed sequence at text[i], or 0 if ill-formed.
std::size_t ValidSequenceAt(std::string_view text, std::size_t i) {
  auto lead = static_cast<unsigned char>(text[i]);
  int extra = ContinuationCount(lead);
  if (extra < 0) return 0;
  if (i + extra >= text.size()) return 0;
  for (int k = 1; k <= extra; ++k) {
    auto b = static_cast<unsigned char>(text[i + k]);
    bool ok = k == 1 ? FirstContinuationOk(lead, b) : IsContinuation(b);
    if (!ok) return 0;
  }
  return static_cast<std::size_t>(extra) + 1;
}

}  // namespace

void AppendEscaped(std::string_view field, std::string *out) {
  for (char c : field) {
    switch (c) {
      case '\\': out->append("\\\\"); break;
      case '\t': out->append("\\t"); break;
      case '\n': out->append("\\n"); break;
      default: out->push_back(c);
    }
  }
}

std::string EscapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  AppendEscaped(field, &out);
  return out;
}

std::optional<std::string> UnescapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i == field.size()) return std::nullopt;
    switch (field[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<std::size_t> FindInvalidUtf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (static_cast<unsigned char>(text[i]) < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = ValidSequenceAt(text, i);
    if (len == 0) return i;
    i += len;
  }
  return std::nullopt;
}

std::string SanitizeUtf8(std::string_view text) {
  if (!FindInvalidUtf8(text)) return std::string(text);
  std::string out;
  out.reserve(text.size() + 8);
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = static_cast<unsigned char>(text[i]) < 0x80
                          ? 1
                          : ValidSequenceAt(text, i);
    if (len == 0) {
      out.append("\xEF\xBF\xBD");
      ++i;
    } else {
      out.append(text.substr(i, len));
      i += len;
    }
  }
  return out;
}

std::optional<std::uint64_t> Utf8StreamValidator::Feed(std::string_view chunk) {
  for (char ch : chunk) {
    auto b = static_cast<unsigned char>(ch);
    if (pending_ > 0) {
      bool ok = seen_ == 0 ? FirstContinuationOk(lead_, b) : IsContinuation(b);
      if (!ok) return seq_start_;
      ++seen_;
      --pending_;
    } else if (b >= 0x80) {
      int extra = ContinuationCount(b);
      if (extra < 0) return offset_;
      lead_ = b;
      pending_ = extra;
      seen_ = 0;
      seq_start_ = offset_;
    }
    ++offset_;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> Utf8StreamValidator::Finish() const {
  if (pending_ > 0) return seq_start_;
  return std::nullopt;
}

}  // namespace snapkit
