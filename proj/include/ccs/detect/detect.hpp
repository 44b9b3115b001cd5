#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/json_io.hpp"

namespace ccs::detect {

inline constexpr std::string_view kDetectionsSchema = "detections.v1";
inline constexpr std::uint8_t kBackground = 255;
inline constexpr std::uint8_t kCellIntensity = 128;
inline constexpr std::uint8_t kPathIntensity = 0;

/// Grayscale image of the cell layout only: filled cell boxes and ruling
/// lines, no glyphs. Row 0 is the top of the page.
struct LayoutRaster {
    int width = 0;
    int height = 0;
    double scale = 2.0;  // pixels per point
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
    double foreground_fraction() const;
    /// Binary PGM (P5).
    std::string to_pgm() const;
    bool operator==(const LayoutRaster&) const = default;
};

/// A pixel is painted when its centre lies inside a cell box; paths are
/// drawn one pixel wide on top. Throws bad-scale for non-positive scale.
LayoutRaster render_layout(const doc::ParsedPage& page, double scale = 2.0);

struct Detection {
    doc::BBox bbox;
    double confidence = 0;
    std::string cls = "table";
    bool operator==(const Detection&) const = default;
};

struct PageDetections {
    int page_number = 1;
    std::vector<Detection> detections;
    bool operator==(const PageDetections&) const = default;
};

struct DocumentDetections {
    std::string doc_id;
    std::vector<PageDetections> pages;
    bool operator==(const DocumentDetections&) const = default;
};

Json to_json(const DocumentDetections& d);
DocumentDetections detections_from_json(const JsonCursor& c);
std::string serialize(const DocumentDetections& d);
DocumentDetections deserialize_detections(std::string_view bytes);

/// Per cell: true (Table) iff some detection with confidence >= threshold
/// covers at least `min_overlap` of the cell's area.
std::vector<bool> overlap_labeling(const std::vector<doc::TextCell>& cells, const std::vector<Detection>& detections,
                                   double threshold, double min_overlap = 0.5);

struct SweepPoint {
    double threshold = 0;
    long long tp = 0, fp = 0, fn = 0;
    double precision = 0, recall = 0, f1 = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // thresholds strictly increasing
    double best_threshold = 0;
    double best_f1 = 0;
};

/// One page worth of sweep input.
struct SweepCase {
    std::vector<doc::TextCell> cells;
    std::vector<Detection> detections;
    std::vector<bool> truth;  // per cell in `cells` order
};

/// Evaluates thresholds {0, 1} and every distinct detection confidence; the
/// best threshold maximises F1 = 2tp / (2tp + fp + fn), lowest on ties.
/// With no true and no predicted positives F1 is 1. Throws empty-input
/// when there are no cells.
SweepResult sweep_confidence(const std::vector<SweepCase>& cases, double min_overlap = 0.5);
SweepResult sweep_confidence(const std::vector<doc::TextCell>& cells, const std::vector<Detection>& detections,
                             const std::vector<bool>& truth, double min_overlap = 0.5);

/// Pluggable table detector.
class Detector {
public:
    virtual ~Detector() = default;
    virtual std::vector<Detection> detect(const doc::ParsedPage& page) const = 0;
    DocumentDetections detect(const doc::ParsedDocument& doc) const;
};

/// Finds blocks of at least three consecutive rows that each hold at least
/// two narrow, column-aligned cells. Confidence is the mean fraction of
/// cells matched between neighbouring rows.
class HeuristicTableDetector final : public Detector {
public:
    struct Config {
        int min_rows = 3;
        int min_columns = 2;
        double max_cell_width_fraction = 0.35;
        double max_row_gap_factor = 3.0;
    };
    HeuristicTableDetector() = default;
    explicit HeuristicTableDetector(Config cfg) : cfg_(cfg) {}
    std::vector<Detection> detect(const doc::ParsedPage& page) const override;
    using Detector::detect;

private:
    Config cfg_;
};

/// Runs `command <parsed.json> <detections.json>` and reads the result.
class ProcessDetector final : public Detector {
public:
    explicit ProcessDetector(std::string command) : command_(std::move(command)) {}
    std::vector<Detection> detect(const doc::ParsedPage& page) const override;
    DocumentDetections detect_document(const doc::ParsedDocument& doc) const;

private:
    std::string command_;
};

}  // namespace ccs::detect
