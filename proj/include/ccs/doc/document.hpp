#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ccs::doc {

inline constexpr int kSchemaVersion = 1;

/// Axis-aligned box in PDF points, origin bottom-left, y growing upward.
struct BBox {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
    double center_x() const { return 0.5 * (x0 + x1); }
    double center_y() const { return 0.5 * (y0 + y1); }
    bool finite() const {
        return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1);
    }
    bool well_formed() const { return finite() && x0 < x1 && y0 < y1; }

    BBox united(const BBox& o) const {
        return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
    }
    double intersection_area(const BBox& o) const {
        double w = std::min(x1, o.x1) - std::max(x0, o.x0);
        double h = std::min(y1, o.y1) - std::max(y0, o.y0);
        return (w > 0 && h > 0) ? w * h : 0.0;
    }

    bool operator==(const BBox&) const = default;
};

struct Point {
    double x = 0, y = 0;
    bool operator==(const Point&) const = default;
};

/// A straight ruling-line segment drawn on the page.
struct PathSegment {
    Point a, b;
    bool vertical(double tol = 0.5) const { return std::abs(a.x - b.x) <= tol; }
    bool horizontal(double tol = 0.5) const { return std::abs(a.y - b.y) <= tol; }
    bool operator==(const PathSegment&) const = default;
};

struct TextStyle {
    bool bold = false;
    bool italic = false;
    double font_size = 0;
    bool operator==(const TextStyle&) const = default;
};

struct TextCell {
    int id = 0;
    BBox bbox;
    std::string text;
    TextStyle style;
    std::optional<std::string> label;
    bool operator==(const TextCell&) const = default;
};

struct PageGeometry {
    double width = 0, height = 0;
    int page_number = 1;
    bool operator==(const PageGeometry&) const = default;
};

/// Embedded bitmap reference. The box is where the image is painted, when the
/// extractor could determine it.
struct ImageRef {
    std::string id;
    std::optional<BBox> bbox;
    bool operator==(const ImageRef&) const = default;
};

struct ParsedPage {
    PageGeometry geometry;
    std::vector<TextCell> cells;
    std::vector<PathSegment> paths;
    std::vector<ImageRef> image_refs;
    bool operator==(const ParsedPage&) const = default;
};

struct ParsedDocument {
    std::string doc_id;
    std::string source_name;
    std::vector<ParsedPage> pages;
    int schema_version = kSchemaVersion;
    bool operator==(const ParsedDocument&) const = default;
};

struct Provenance {
    BBox bbox;
    int page = 1;
    bool operator==(const Provenance&) const = default;
};

struct DocumentObject {
    std::string type;
    std::string text;
    std::vector<Provenance> prov;
    bool operator==(const DocumentObject&) const = default;
};

struct TableObject {
    std::vector<Provenance> prov;
    std::vector<std::vector<std::string>> rows;
    bool operator==(const TableObject&) const = default;
};

struct ImageObject {
    std::vector<Provenance> prov;
    std::optional<std::string> ref;
    bool operator==(const ImageObject&) const = default;
};

struct Description {
    std::string title;
    std::string abstract;
    std::string affiliations;
    std::string authors;
    bool operator==(const Description&) const = default;
};

struct StructuredDocument {
    std::string doc_id;
    Description description;
    std::vector<DocumentObject> main_text;
    std::vector<TableObject> tables;
    std::vector<ImageObject> images;
    int schema_version = kSchemaVersion;
    bool operator==(const StructuredDocument&) const = default;
};

/// Per-page cell labels, indexed by cell id. Produced by predict and by
/// annotation, consumed by assemble.
struct PageLabels {
    int page_number = 1;
    std::vector<std::string> labels;
    std::vector<double> confidence;  // empty for human labels
    bool operator==(const PageLabels&) const = default;
};

struct DocumentLabels {
    std::string doc_id;
    std::vector<PageLabels> pages;
    bool operator==(const DocumentLabels&) const = default;
};

/// Copies labels stored on the cells into a DocumentLabels value (missing
/// labels become empty strings).
DocumentLabels labels_from_cells(const ParsedDocument& doc);

/// Writes labels onto the cells of a copy of `doc`.
ParsedDocument with_labels(ParsedDocument doc, const DocumentLabels& labels);

}  // namespace ccs::doc
