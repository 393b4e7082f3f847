#ifndef SNAPKIT_SRC_XML_DUMP_READER_H_
#define SNAPKIT_SRC_XML_DUMP_READER_H_

#include <istream>
#include <memory>
#include <string>

#include "snapkit/ingest.h"

namespace snapkit {

// Streaming reader over a pages-articles XML dump. Reads page/title, page/ns,
// page/id and the text of the last page/revision.
std::unique_ptr<ArticleReader> MakeXmlDumpReader(std::istream &in,
                                                 std::string snapshot_tag);

}  // namespace snapkit

#endif  // SNAPKIT_SRC_XML_DUMP_READER_H_
