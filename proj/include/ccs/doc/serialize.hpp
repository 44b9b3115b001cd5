#pragma once

#include <string>
#include <string_view>

#include "ccs/doc/document.hpp"
#include "ccs/doc/labels.hpp"
#include "ccs/json_io.hpp"

namespace ccs::doc {

inline constexpr std::string_view kParsedSchema = "parsed-document.v1";
inline constexpr std::string_view kStructuredSchema = "structured-document.v1";
inline constexpr std::string_view kLabelsSchema = "labels.v1";

Json bbox_to_json(const BBox& b);
BBox bbox_from_json(const JsonCursor& c);

Json to_json(const ParsedPage& page);
ParsedPage page_from_json(const JsonCursor& c);

Json to_json(const ParsedDocument& doc);
ParsedDocument parsed_from_json(const JsonCursor& c);

Json to_json(const StructuredDocument& doc);
StructuredDocument structured_from_json(const JsonCursor& c);

Json to_json(const DocumentLabels& labels);
DocumentLabels labels_from_json(const JsonCursor& c);

Json to_json(const LabelSet& labels);
LabelSet label_set_from_json(const JsonCursor& c);

/// Canonical bytes. Cells are written in id order and pages in page order,
/// whatever order they have in memory.
std::string serialize(const ParsedDocument& doc);
std::string serialize(const StructuredDocument& doc);
std::string serialize(const DocumentLabels& labels);

/// Throws Error(schema-violation) naming the JSON path of the first problem.
ParsedDocument deserialize_parsed(std::string_view bytes);
StructuredDocument deserialize_structured(std::string_view bytes);
DocumentLabels deserialize_labels(std::string_view bytes);

}  // namespace ccs::doc
