#ifndef SNAPKIT_ERRORS_H_
#define SNAPKIT_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snapkit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural violation in an input stream. `position` is the 1-based line
// number for line-oriented formats and the byte offset for XML dumps.
class MalformedInput : public Error {
 public:
  MalformedInput(std::uint64_t position, const std::string &what)
      : Error("malformed input at " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t position_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(std::uint64_t position)
      : Error("invalid UTF-8 byte sequence at " + std::to_string(position)),
        position_(position) {}
  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t position_;
};

// Wrong number of tab-separated columns on a line.
class ArityError : public Error {
 public:
  ArityError(std::uint64_t line, std::size_t expected, std::size_t actual)
      : Error("line " + std::to_string(line) + ": expected " +
              std::to_string(expected) + " columns, got " +
              std::to_string(actual)),
        line_(line) {}
  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

class DuplicateEntity : public Error {
 public:
  explicit DuplicateEntity(const std::string &entity_id)
      : Error("entity " + entity_id + " maps to more than one article"),
        entity_id_(entity_id) {}
  const std::string &entity_id() const { return entity_id_; }

 private:
  std::string entity_id_;
};

class DuplicateArticle : public Error {
 public:
  DuplicateArticle(const std::string &article_id, const std::string &tag)
      : Error("article " + article_id + " occurs twice in snapshot " + tag),
        article_id_(article_id) {}
  const std::string &article_id() const { return article_id_; }

 private:
  std::string article_id_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidRate : public Error {
 public:
  explicit InvalidRate(double rate)
      : Error("sample rate must lie in (0, 1], got " + std::to_string(rate)) {}
};

// A report violates an invariant required for rendering.
class RenderError : public Error {
 public:
  using Error::Error;
};

// An ingestion error annotated with the file it came from.
class InputError : public Error {
 public:
  using Error::Error;
};

// Bad configuration or command-line arguments, detected before processing.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace snapkit

#endif  // SNAPKIT_ERRORS_H_
