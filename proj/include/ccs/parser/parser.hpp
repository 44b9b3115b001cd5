#pragma once

#include <string>
#include <string_view>

#include "ccs/doc/document.hpp"
#include "ccs/parser/normalize.hpp"
#include "ccs/parser/snippet.hpp"

namespace ccs::parser {

struct ParseConfig {
    NormalizationConfig normalization;
    /// Pages normalized concurrently; 0 picks the hardware concurrency.
    unsigned threads = 1;
};

/// Extracts and normalizes every page. doc_id is the SHA-256 of `bytes`.
/// Throws parse-failure for documents without pages.
doc::ParsedDocument parse_document(std::string_view bytes, const ParseConfig& cfg = {},
                                   const ExtractionBackend* backend = nullptr, std::string source_name = "",
                                   NormalizationReport* report = nullptr);

/// Normalization step alone, for callers that already hold snippets.
doc::ParsedDocument normalize_document(const ExtractedDocument& extracted, const std::string& doc_id,
                                       const ParseConfig& cfg = {}, std::string source_name = "",
                                       NormalizationReport* report = nullptr);

}  // namespace ccs::parser
