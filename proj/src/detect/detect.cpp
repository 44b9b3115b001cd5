#include "ccs/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/hash.hpp"

namespace ccs::detect {

double LayoutRaster::foreground_fraction() const {
    if (pixels.empty()) return 0.0;
    const auto fg = std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t p) { return p != kBackground; });
    return static_cast<double>(fg) / static_cast<double>(pixels.size());
}

std::string LayoutRaster::to_pgm() const {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
}

LayoutRaster render_layout(const doc::ParsedPage& page, double scale) {
    if (!(scale > 0) || !std::isfinite(scale)) throw Error(errc::kBadScale, "scale must be positive");
    LayoutRaster r;
    r.scale = scale;
    const double pw = page.geometry.width, ph = page.geometry.height;
    r.width = static_cast<int>(std::ceil(pw * scale));
    r.height = static_cast<int>(std::ceil(ph * scale));
    r.pixels.assign(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height), kBackground);
    auto set = [&](int x, int y, std::uint8_t v) {
        if (x < 0 || y < 0 || x >= r.width || y >= r.height) return;
        r.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(x)] = v;
    };
    // pixel (px, py) has its centre at ((px + .5) / scale, ph - (py + .5) / scale)
    for (const auto& c : page.cells) {
        const doc::BBox& b = c.bbox;
        const int px0 = std::max(0, static_cast<int>(std::ceil(b.x0 * scale - 0.5)));
        const int px1 = std::min(r.width - 1, static_cast<int>(std::floor(b.x1 * scale - 0.5)));
        const int py0 = std::max(0, static_cast<int>(std::ceil((ph - b.y1) * scale - 0.5)));
        const int py1 = std::min(r.height - 1, static_cast<int>(std::floor((ph - b.y0) * scale - 0.5)));
        for (int y = py0; y <= py1; ++y) {
            for (int x = px0; x <= px1; ++x) set(x, y, kCellIntensity);
        }
    }
    for (const auto& seg : page.paths) {
        const double x0 = seg.a.x * scale, y0 = (ph - seg.a.y) * scale;
        const double x1 = seg.b.x * scale, y1 = (ph - seg.b.y) * scale;
        const int steps = std::max(1, static_cast<int>(std::ceil(2 * std::max(std::abs(x1 - x0), std::abs(y1 - y0)))));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            set(static_cast<int>(std::floor(x0 + t * (x1 - x0))), static_cast<int>(std::floor(y0 + t * (y1 - y0))),
                kPathIntensity);
        }
    }
    return r;
}

Json to_json(const DocumentDetections& d) {
    Json pages = Json::array();
    for (const auto& p : d.pages) {
        Json dets = Json::array();
        for (const auto& det : p.detections) {
            dets.push_back({{"bbox", doc::bbox_to_json(det.bbox)}, {"confidence", det.confidence}, {"class", det.cls}});
        }
        pages.push_back({{"page_number", p.page_number}, {"detections", std::move(dets)}});
    }
    return {{"schema", kDetectionsSchema}, {"schema_version", doc::kSchemaVersion}, {"doc_id", d.doc_id}, {"pages", std::move(pages)}};
}

DocumentDetections detections_from_json(const JsonCursor& c) {
    c.expect_object();
    auto tag = c.at("schema");
    if (tag.string() != kDetectionsSchema) tag.fail("expected schema '" + std::string(kDetectionsSchema) + "'");
    auto version = c.at("schema_version");
    if (version.integer() != doc::kSchemaVersion) version.fail("unsupported schema_version " + std::to_string(version.integer()));
    DocumentDetections d;
    d.doc_id = c.at("doc_id").string();
    auto pages = c.at("pages");
    for (std::size_t i = 0, n = pages.array_size(); i < n; ++i) {
        auto jp = pages.at(i);
        PageDetections p;
        p.page_number = static_cast<int>(jp.at("page_number").integer());
        auto dets = jp.at("detections");
        for (std::size_t k = 0, m = dets.array_size(); k < m; ++k) {
            auto jd = dets.at(k);
            Detection det;
            det.bbox = doc::bbox_from_json(jd.at("bbox"));
            auto conf = jd.at("confidence");
            det.confidence = conf.number();
            if (det.confidence < 0 || det.confidence > 1) conf.fail("confidence must lie in [0, 1]");
            if (auto cls = jd.find("class")) det.cls = cls->string();
            p.detections.push_back(std::move(det));
        }
        d.pages.push_back(std::move(p));
    }
    return d;
}

std::string serialize(const DocumentDetections& d) { return canonical_dump(to_json(d)); }

DocumentDetections deserialize_detections(std::string_view bytes) {
    Json j = parse_json(bytes);
    return detections_from_json(JsonCursor(j));
}

std::vector<bool> overlap_labeling(const std::vector<doc::TextCell>& cells, const std::vector<Detection>& detections,
                                   double threshold, double min_overlap) {
    std::vector<bool> out(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double area = cells[i].bbox.area();
        if (!(area > 0)) continue;
        for (const auto& d : detections) {
            if (d.confidence < threshold) continue;
            if (d.bbox.intersection_area(cells[i].bbox) / area >= min_overlap) {
                out[i] = true;
                break;
            }
        }
    }
    return out;
}

namespace {

SweepPoint score(double threshold, long long tp, long long fp, long long fn) {
    SweepPoint p;
    p.threshold = threshold;
    p.tp = tp;
    p.fp = fp;
    p.fn = fn;
    const bool nothing = tp + fp + fn == 0;
    p.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : (nothing ? 1.0 : 0.0);
    p.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : (nothing ? 1.0 : 0.0);
    p.f1 = nothing ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    return p;
}

}  // namespace

SweepResult sweep_confidence(const std::vector<SweepCase>& cases, double min_overlap) {
    std::size_t cells = 0;
    std::vector<double> thresholds{0.0, 1.0};
    for (const auto& c : cases) {
        if (c.truth.size() != c.cells.size()) throw Error(errc::kShapeError, "truth must have one entry per cell");
        cells += c.cells.size();
        for (const auto& d : c.detections) thresholds.push_back(d.confidence);
    }
    if (cells == 0) throw Error(errc::kEmptyInput, "no cells to evaluate");
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    SweepResult result;
    for (double t : thresholds) {
        long long tp = 0, fp = 0, fn = 0;
        for (const auto& c : cases) {
            const auto predicted = overlap_labeling(c.cells, c.detections, t, min_overlap);
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                if (predicted[i] && c.truth[i]) ++tp;
                else if (predicted[i]) ++fp;
                else if (c.truth[i]) ++fn;
            }
        }
        result.points.push_back(score(t, tp, fp, fn));
    }
    result.best_f1 = -1;
    for (const auto& p : result.points) {
        if (p.f1 > result.best_f1) {
            result.best_f1 = p.f1;
            result.best_threshold = p.threshold;
        }
    }
    return result;
}

SweepResult sweep_confidence(const std::vector<doc::TextCell>& cells, const std::vector<Detection>& detections,
                             const std::vector<bool>& truth, double min_overlap) {
    return sweep_confidence(std::vector<SweepCase>{{cells, detections, truth}}, min_overlap);
}

DocumentDetections Detector::detect(const doc::ParsedDocument& doc) const {
    DocumentDetections out;
    out.doc_id = doc.doc_id;
    for (const auto& page : doc.pages) out.pages.push_back({page.geometry.page_number, detect(page)});
    return out;
}

std::vector<Detection> HeuristicTableDetector::detect(const doc::ParsedPage& page) const {
    const double max_width = cfg_.max_cell_width_fraction * page.geometry.width;
    std::vector<const doc::TextCell*> narrow;
    for (const auto& c : page.cells) {
        if (c.bbox.width() <= max_width) narrow.push_back(&c);
    }
    if (narrow.empty()) return {};

    // rows: cells whose vertical centres fall inside the row's band
    std::sort(narrow.begin(), narrow.end(), [](const doc::TextCell* a, const doc::TextCell* b) {
        if (a->bbox.center_y() != b->bbox.center_y()) return a->bbox.center_y() > b->bbox.center_y();
        return a->bbox.x0 < b->bbox.x0;
    });
    struct Row {
        double top, bottom, center;
        std::vector<const doc::TextCell*> cells;
    };
    std::vector<Row> rows;
    for (const doc::TextCell* c : narrow) {
        if (!rows.empty()) {
            Row& r = rows.back();
            const double half = 0.5 * std::min(r.top - r.bottom, c->bbox.height());
            if (std::abs(r.center - c->bbox.center_y()) <= half) {
                r.cells.push_back(c);
                r.top = std::max(r.top, c->bbox.y1);
                r.bottom = std::min(r.bottom, c->bbox.y0);
                continue;
            }
        }
        rows.push_back({c->bbox.y1, c->bbox.y0, c->bbox.center_y(), {c}});
    }
    for (auto& r : rows) {
        std::sort(r.cells.begin(), r.cells.end(), [](const doc::TextCell* a, const doc::TextCell* b) {
            return a->bbox.x0 < b->bbox.x0;
        });
    }

    // fraction of cells of the larger row that pair up with an x-overlapping cell of the other
    auto alignment = [](const Row& a, const Row& b) {
        std::size_t matched = 0, j = 0;
        for (const doc::TextCell* c : a.cells) {
            while (j < b.cells.size() && b.cells[j]->bbox.x1 <= c->bbox.x0) ++j;
            if (j < b.cells.size() && b.cells[j]->bbox.x0 < c->bbox.x1) {
                ++matched;
                ++j;
            }
        }
        return std::pair{matched, static_cast<double>(matched) / static_cast<double>(std::max(a.cells.size(), b.cells.size()))};
    };

    std::vector<Detection> out;
    const auto min_cols = static_cast<std::size_t>(cfg_.min_columns);
    std::size_t i = 0;
    while (i < rows.size()) {
        if (rows[i].cells.size() < min_cols) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double score_sum = 0;
        while (j + 1 < rows.size()) {
            const Row& a = rows[j];
            const Row& b = rows[j + 1];
            if (b.cells.size() < min_cols) break;
            const double height = std::max(a.top - a.bottom, b.top - b.bottom);
            if (a.bottom - b.top > cfg_.max_row_gap_factor * height) break;
            auto [matched, score] = alignment(a, b);
            if (matched < min_cols) break;
            score_sum += score;
            ++j;
        }
        const std::size_t n_rows = j - i + 1;
        if (n_rows >= static_cast<std::size_t>(cfg_.min_rows)) {
            doc::BBox box = rows[i].cells.front()->bbox;
            for (std::size_t r = i; r <= j; ++r) {
                for (const doc::TextCell* c : rows[r].cells) box = box.united(c->bbox);
            }
            out.push_back({box, score_sum / static_cast<double>(n_rows - 1), "table"});
        }
        i = j + 1;
    }
    return out;
}

std::vector<Detection> ProcessDetector::detect(const doc::ParsedPage& page) const {
    doc::ParsedDocument single;
    single.doc_id = "page";
    single.pages.push_back(page);
    single.pages.back().geometry.page_number = 1;
    auto result = detect_document(single);
    return result.pages.empty() ? std::vector<Detection>{} : result.pages.front().detections;
}

DocumentDetections ProcessDetector::detect_document(const doc::ParsedDocument& doc) const {
    namespace fs = std::filesystem;
    const std::string bytes = doc::serialize(doc);
    const fs::path dir = fs::temp_directory_path() / ("ccs-detect-" + sha256_hex(bytes + command_).substr(0, 16));
    fs::create_directories(dir);
    const fs::path in = dir / "parsed.json", out = dir / "detections.json";
    {
        std::ofstream f(in, std::ios::binary);
        f << bytes;
    }
    const std::string cmd = command_ + " '" + in.string() + "' '" + out.string() + "'";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        fs::remove_all(dir);
        throw Error(errc::kIo, "detector command failed with status " + std::to_string(rc));
    }
    std::ifstream f(out, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    fs::remove_all(dir);
    return deserialize_detections(ss.str());
}

}  // namespace ccs::detect
