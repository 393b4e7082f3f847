#include "xml_dump_reader.h"

#include <expat.h>

#include <array>
#include <deque>
#include <string_view>

#include "snapkit/errors.h"
#include "snapkit/escape.h"

namespace snapkit {
namespace {

constexpr std::size_t kChunkSize = 1 << 16;

enum class Field { kNone, kTitle, kNs, kId, kText };

class XmlDumpReader : public ArticleReader {
 public:
  XmlDumpReader(std::istream &in, std::string tag)
      : in_(in), tag_(std::move(tag)), parser_(XML_ParserCreate("UTF-8")) {
    if (parser_ == nullptr) throw IoError("cannot allocate XML parser");
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &XmlDumpReader::OnStart, &XmlDumpReader::OnEnd);
    XML_SetCharacterDataHandler(parser_, &XmlDumpReader::OnText);
  }

  ~XmlDumpReader() override { XML_ParserFree(parser_); }

  XmlDumpReader(const XmlDumpReader &) = delete;
  XmlDumpReader &operator=(const XmlDumpReader &) = delete;

  std::optional<ArticleSnapshot> Next() override {
    while (ready_.empty() && !finished_) Pump();
    if (ready_.empty()) return std::nullopt;
    ArticleSnapshot article = std::move(ready_.front());
    ready_.pop_front();
    return article;
  }

 private:
  // Feeds one chunk (or the final empty chunk) to the parser.
  void Pump() {
    in_.read(buffer_.data(), buffer_.size());
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (in_.bad()) throw IoError("read failed at byte " + std::to_string(bytes_read_));
    const bool final = got < buffer_.size();
    std::string_view chunk(buffer_.data(), got);
    if (auto bad = utf8_.Feed(chunk)) throw EncodingError(*bad);
    if (final) {
      if (auto bad = utf8_.Finish()) throw EncodingError(*bad);
    }
    bytes_read_ += got;
    if (final && bytes_read_ == 0) {
      finished_ = true;
      return;
    }
    if (XML_Parse(parser_, chunk.data(), static_cast<int>(got), final) ==
        XML_STATUS_ERROR) {
      throw MalformedInput(static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser_)),
                           XML_ErrorString(XML_GetErrorCode(parser_)));
    }
    if (final) {
      if (depth_ != 0) throw MalformedInput(bytes_read_, "truncated document");
      finished_ = true;
    }
  }

  static void XMLCALL OnStart(void *data, const XML_Char *name, const XML_Char **) {
    static_cast<XmlDumpReader *>(data)->Start(name);
  }
  static void XMLCALL OnEnd(void *data, const XML_Char *name) {
    static_cast<XmlDumpReader *>(data)->End(name);
  }
  static void XMLCALL OnText(void *data, const XML_Char *s, int len) {
    auto *self = static_cast<XmlDumpReader *>(data);
    if (self->field_ != Field::kNone) {
      self->value_.append(s, static_cast<std::size_t>(len));
    }
  }

  std::uint64_t Position() const {
    return static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser_));
  }

  void Start(std::string_view name) {
    ++depth_;
    if (name == "page") {
      if (in_page_) throw MalformedInput(Position(), "nested <page>");
      in_page_ = true;
      page_depth_ = depth_;
      title_.clear();
      id_.clear();
      ns_.clear();
      text_.clear();
      has_id_ = false;
      return;
    }
    if (!in_page_) return;
    const int rel = depth_ - page_depth_;
    if (name == "revision" && rel == 1) {
      in_revision_ = true;
      text_.clear();
    } else if (rel == 1 && name == "title") {
      Begin(Field::kTitle);
    } else if (rel == 1 && name == "ns") {
      Begin(Field::kNs);
    } else if (rel == 1 && name == "id") {
      Begin(Field::kId);
    } else if (rel == 2 && in_revision_ && name == "text") {
      Begin(Field::kText);
    }
  }

  void Begin(Field f) {
    field_ = f;
    value_.clear();
  }

  void End(std::string_view name) {
    if (field_ != Field::kNone) {
      switch (field_) {
        case Field::kTitle: title_ = std::move(value_); break;
        case Field::kNs: ns_ = std::move(value_); break;
        case Field::kId:
          id_ = std::move(value_);
          has_id_ = true;
          break;
        case Field::kText: text_ = std::move(value_); break;
        case Field::kNone: break;
      }
      field_ = Field::kNone;
      value_.clear();
    } else if (in_page_ && name == "revision" && depth_ - page_depth_ == 1) {
      in_revision_ = false;
    } else if (in_page_ && name == "page" && depth_ == page_depth_) {
      FinishPage();
    }
    --depth_;
  }

  void FinishPage() {
    in_page_ = false;
    if (!has_id_ || id_.empty()) throw MalformedInput(Position(), "<page> without <id>");
    if (!ns_.empty() && ns_ != "0") return;
    if (IsRedirect(text_)) return;
    ready_.push_back({std::move(id_), std::move(title_), std::move(text_), tag_});
  }

  std::istream &in_;
  std::string tag_;
  XML_Parser parser_;
  std::array<char, kChunkSize> buffer_{};
  Utf8StreamValidator utf8_;
  std::uint64_t bytes_read_ = 0;
  bool finished_ = false;
  std::deque<ArticleSnapshot> ready_;

  int depth_ = 0;
  int page_depth_ = 0;
  bool in_page_ = false;
  bool in_revision_ = false;
  bool has_id_ = false;
  Field field_ = Field::kNone;
  std::string value_;
  std::string title_, id_, ns_, text_;
};

}  // namespace

std::unique_ptr<ArticleReader> MakeXmlDumpReader(std::istream &in,
                                                 std::string snapshot_tag) {
  return std::make_unique<XmlDumpReader>(in, std::move(snapshot_tag));
}

}  // namespace snapkit
