#pragma once

#include "ccs/parser/pdf_file.hpp"
#include "ccs/parser/snippet.hpp"

namespace ccs::parser {

/// Runs the page's content streams (including form XObjects) and collects
/// one RawSnippet per visible text-showing operator, stroked ruling lines and
/// painted images. Coordinates are shifted so the media box origin is (0, 0).
PageSnippets extract_page(const pdf::File& file, const pdf::PageInfo& page, int page_number);

}  // namespace ccs::parser
