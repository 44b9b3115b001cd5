#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/parser/snippet.hpp"

namespace ccs::testing {

doc::TextCell cell(int id, double x0, double y0, double x1, double y1, std::string text = "x",
                   std::optional<std::string> label = std::nullopt, double font_size = 10);

doc::ParsedPage page_of(std::vector<doc::TextCell> cells, double width = 612, double height = 792, int number = 1);

doc::ParsedDocument document_of(std::vector<doc::ParsedPage> pages, std::string doc_id = "doc");

/// Line-granular snippet with evenly spread glyphs.
parser::RawSnippet snippet(double x0, double baseline, double x1, std::string text, double size = 10);

/// The published confusion matrix of the six-label journal model, rows are
/// true labels, columns predicted, in the order of `journal_labels()`.
const std::vector<std::vector<long long>>& journal_confusion();
const std::vector<std::string>& journal_labels();

/// Removes the directory on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace ccs::testing
