#include "fixtures.hpp"

#include <atomic>
#include <unistd.h>

namespace ccs::testing {

doc::TextCell cell(int id, double x0, double y0, double x1, double y1, std::string text,
                   std::optional<std::string> label, double font_size) {
    doc::TextCell c;
    c.id = id;
    c.bbox = {x0, y0, x1, y1};
    c.text = std::move(text);
    c.style.font_size = font_size;
    c.label = std::move(label);
    return c;
}

doc::ParsedPage page_of(std::vector<doc::TextCell> cells, double width, double height, int number) {
    doc::ParsedPage p;
    p.geometry = {width, height, number};
    p.cells = std::move(cells);
    return p;
}

doc::ParsedDocument document_of(std::vector<doc::ParsedPage> pages, std::string doc_id) {
    doc::ParsedDocument d;
    d.doc_id = std::move(doc_id);
    d.source_name = "fixture.pdf";
    d.pages = std::move(pages);
    return d;
}

parser::RawSnippet snippet(double x0, double baseline, double x1, std::string text, double size) {
    parser::RawSnippet s;
    s.bbox = {x0, baseline - 0.25 * size, x1, baseline + 0.75 * size};
    s.text = std::move(text);
    s.font = {"Helvetica", size, false, false};
    s.baseline_y = baseline;
    return s;
}

const std::vector<std::vector<long long>>& journal_confusion() {
    static const std::vector<std::vector<long long>> m{
        {75, 0, 0, 0, 0, 0},      {1, 670, 0, 0, 0, 0},       {0, 0, 325, 0, 0, 0},
        {1, 17, 0, 56460, 14, 0}, {0, 0, 0, 4, 4223, 26},      {0, 0, 0, 0, 1, 3418}};
    return m;
}

const std::vector<std::string>& journal_labels() {
    static const std::vector<std::string> l{"title", "author", "subtitle", "text", "picture", "table"};
    return l;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ccs-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace ccs::testing
