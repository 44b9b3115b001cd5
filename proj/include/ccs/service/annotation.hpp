#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/doc/labels.hpp"
#include "ccs/json_io.hpp"

namespace ccs::service {

inline constexpr std::string_view kAnnotationSchema = "annotation-record.v1";

enum class AnnotationSource { kFresh, kCorrected };

/// Ground truth for one page as submitted by an annotator.
struct AnnotationRecord {
    std::string doc_id;
    int page_number = 1;
    std::vector<std::string> labels;  // by cell id
    std::string annotator;
    std::int64_t started_ms = 0;
    std::int64_t submitted_ms = 0;
    AnnotationSource source = AnnotationSource::kFresh;
    /// Cells whose label differs from the pre-annotation; absent for fresh
    /// pages, which have nothing to differ from.
    std::optional<int> corrections_count;
    /// The labels the annotator was shown, when the page was pre-annotated.
    std::optional<std::vector<std::string>> pre_annotation;

    Json to_json() const;
    static AnnotationRecord from_json(const JsonCursor& c);
    bool operator==(const AnnotationRecord&) const = default;
};

struct AnnotationIssue {
    std::optional<int> cell_id;
    std::string message;
};

/// Checks the record against the page it annotates: one known label per
/// cell, coherent timestamps and correction bookkeeping. Empty when valid.
std::vector<AnnotationIssue> check_annotation(const AnnotationRecord& record, const doc::ParsedPage& page,
                                              const doc::LabelSet& labels);

/// Number of cells whose labels differ. Throws shape-error when the two
/// labelings cover different cells.
int diff_corrections(const std::vector<std::string>& pre_annotation, const std::vector<std::string>& submitted);

struct RateWindow {
    std::size_t first = 0;  // index of the first record in the window
    std::size_t pages = 0;
    double minutes = 0;
    double rate = 0;  // pages per minute
};

struct SessionStats {
    std::vector<RateWindow> windows;
    std::vector<std::int64_t> retrains;
    /// Rate between consecutive retrain markers: pages / elapsed minutes of
    /// the records submitted in that stretch.
    std::vector<RateWindow> segments;

    Json to_json() const;
};

/// Sliding windows of `window` consecutive pages; a window's elapsed time runs
/// from its first start to its last submission. Throws bad-ordering when
/// submissions go backwards or a page is submitted before it was started.
SessionStats compute_session_stats(const std::vector<AnnotationRecord>& records,
                                   const std::vector<std::int64_t>& retrains, std::size_t window = 10);

}  // namespace ccs::service
