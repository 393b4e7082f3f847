#ifndef SNAPKIT_ESCAPE_H_
#define SNAPKIT_ESCAPE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snapkit {

// Field escaping shared by every tab-separated file: backslash, tab and
// newline become \\, \t and \n.
std::string EscapeField(std::string_view field);
void AppendEscaped(std::string_view field, std::string *out);

// Inverse of EscapeField. Returns nullopt on a dangling or unknown escape.
std::optional<std::string> UnescapeField(std::string_view field);

// Splits an (unescaped-on-the-wire) line on raw tabs.
std::vector<std::string_view> SplitTabs(std::string_view line);

// Returns the byte offset of the first ill-formed UTF-8 sequence, or nullopt
// if `text` is well-formed.
std::optional<std::size_t> FindInvalidUtf8(std::string_view text);

// Replaces every ill-formed UTF-8 sequence with U+FFFD.
std::string SanitizeUtf8(std::string_view text);

// Incremental validator for byte streams where multi-byte sequences may be
// split across chunk boundaries.
class Utf8StreamValidator {
 public:
  // Returns the absolute offset of the first bad byte in this chunk, if any.
  std::optional<std::uint64_t> Feed(std::string_view chunk);
  // Call at end of stream; reports a truncated trailing sequence.
  std::optional<std::uint64_t> Finish() const;

 private:
  std::uint64_t offset_ = 0;
  int pending_ = 0;        // continuation bytes still expected
  unsigned char lead_ = 0; // lead byte of the pending sequence
  int seen_ = 0;           // continuation bytes seen so far
  std::uint64_t seq_start_ = 0;
};

}  // namespace snapkit

#endif  // SNAPKIT_ESCAPE_H_
