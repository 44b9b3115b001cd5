#include "ccs/ml/features.hpp"

#include <cmath>

#include "ccs/parser/snippet.hpp"

namespace ccs::ml {

const std::vector<std::string>& base_feature_names() {
    static const std::vector<std::string> kNames = {
        "page_number", "width",     "height",     "x0",         "y0",   "x1",        "y1",
        "dist_above",  "dist_below", "dist_left", "dist_right", "italic", "bold",    "font_size",
        "numeric_fraction", "char_count"};
    return kNames;
}

std::vector<Neighbors> neighbor_graph(const doc::ParsedPage& page) {
    const auto& cells = page.cells;
    std::vector<Neighbors> out(cells.size());
    // indexed by cell id
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const doc::BBox& a = cells[i].bbox;
        std::array<double, 4> best;
        best.fill(INFINITY);
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (i == j) continue;
            const doc::BBox& b = cells[j].bbox;
            const double dx = b.center_x() - a.center_x();
            const double dy = b.center_y() - a.center_y();
            if (dx == 0 && dy == 0) continue;
            const bool x_overlap = b.x0 < a.x1 && a.x0 < b.x1;
            const bool y_overlap = b.y0 < a.y1 && a.y0 < b.y1;
            int dir = -1;
            if (std::abs(dy) >= std::abs(dx)) {
                if (x_overlap) dir = dy > 0 ? kAbove : kBelow;
            } else if (y_overlap) {
                dir = dx > 0 ? kRight : kLeft;
            }
            if (dir < 0) continue;
            const double d = std::hypot(dx, dy);
            const int jid = cells[j].id;
            auto& slot = out[static_cast<std::size_t>(cells[i].id)][static_cast<std::size_t>(dir)];
            if (d < best[static_cast<std::size_t>(dir)] || (d == best[static_cast<std::size_t>(dir)] && slot && jid < *slot)) {
                best[static_cast<std::size_t>(dir)] = d;
                slot = jid;
            }
        }
    }
    return out;
}

double numeric_fraction(std::string_view text) {
    std::size_t total = 0, digits = 0;
    for (char32_t cp : parser::utf8_decode(text)) {
        if (cp == ' ' || cp == '\t') continue;
        ++total;
        if (cp >= '0' && cp <= '9') ++digits;
    }
    return total ? static_cast<double>(digits) / static_cast<double>(total) : 0.0;
}

FeatureMatrix extract_features(const doc::ParsedPage& page) { return extract_features(page, neighbor_graph(page)); }

FeatureMatrix extract_features(const doc::ParsedPage& page, const std::vector<Neighbors>& graph) {
    FeatureMatrix m;
    m.cols = kBaseFeatureCount;
    m.data.reserve(page.cells.size() * m.cols);
    const double pw = page.geometry.width, ph = page.geometry.height;
    // cells are addressed by id; the page keeps them in id order
    std::vector<const doc::TextCell*> by_id(page.cells.size());
    for (const auto& c : page.cells) by_id[static_cast<std::size_t>(c.id)] = &c;
    for (std::size_t i = 0; i < by_id.size(); ++i) {
        const doc::TextCell& c = *by_id[i];
        const doc::BBox& b = c.bbox;
        const Neighbors& nb = graph[i];
        auto gap = [&](int dir) -> double {
            const auto& id = nb[static_cast<std::size_t>(dir)];
            if (!id) {
                switch (dir) {
                    case kAbove: return ph - b.y1;
                    case kBelow: return b.y0;
                    case kLeft: return b.x0;
                    default: return pw - b.x1;
                }
            }
            const doc::BBox& o = by_id[static_cast<std::size_t>(*id)]->bbox;
            double d = 0;
            switch (dir) {
                case kAbove: d = o.y0 - b.y1; break;
                case kBelow: d = b.y0 - o.y1; break;
                case kLeft: d = b.x0 - o.x1; break;
                default: d = o.x0 - b.x1; break;
            }
            return std::max(0.0, d);
        };
        const float row[kBaseFeatureCount] = {
            static_cast<float>(page.geometry.page_number),
            static_cast<float>(b.width()),
            static_cast<float>(b.height()),
            static_cast<float>(b.x0 / pw),
            static_cast<float>(b.y0 / ph),
            static_cast<float>(b.x1 / pw),
            static_cast<float>(b.y1 / ph),
            static_cast<float>(gap(kAbove)),
            static_cast<float>(gap(kBelow)),
            static_cast<float>(gap(kLeft)),
            static_cast<float>(gap(kRight)),
            c.style.italic ? 1.0f : 0.0f,
            c.style.bold ? 1.0f : 0.0f,
            static_cast<float>(c.style.font_size),
            static_cast<float>(numeric_fraction(c.text)),
            static_cast<float>(parser::utf8_decode(c.text).size()),
        };
        m.data.insert(m.data.end(), row, row + kBaseFeatureCount);
    }
    return m;
}

FeatureMatrix with_neighbor_labels(const FeatureMatrix& base, const std::vector<Neighbors>& graph,
                                   const std::vector<int>& labels, std::size_t n_labels) {
    FeatureMatrix m;
    m.cols = base.cols + 4 * n_labels;
    m.data.assign(base.rows() * m.cols, 0.0f);
    for (std::size_t r = 0; r < base.rows(); ++r) {
        std::copy(base.row(r), base.row(r) + base.cols, m.data.begin() + static_cast<std::ptrdiff_t>(r * m.cols));
        for (std::size_t d = 0; d < 4; ++d) {
            const auto& id = graph[r][d];
            if (!id) continue;
            const int label = labels[static_cast<std::size_t>(*id)];
            if (label < 0) continue;
            m.data[r * m.cols + base.cols + d * n_labels + static_cast<std::size_t>(label)] = 1.0f;
        }
    }
    return m;
}

}  // namespace ccs::ml
