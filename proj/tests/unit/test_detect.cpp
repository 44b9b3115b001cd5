#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ccs/detect/detect.hpp"
#include "ccs/error.hpp"
#include "ccs/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ccs;
using detect::Detection;
using testing::cell;
using testing::page_of;

namespace {

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

Detection det(double x0, double y0, double x1, double y1, double conf) { return {{x0, y0, x1, y1}, conf, "table"}; }

// Brute-force F1 at one threshold, straight from the definition.
double f1_at(const detect::SweepCase& c, double t, double min_overlap) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        bool hit = false;
        for (const auto& d : c.detections) {
            if (d.confidence >= t && c.cells[i].bbox.intersection_area(d.bbox) >= min_overlap * c.cells[i].bbox.area()) hit = true;
        }
        tp += hit && c.truth[i];
        fp += hit && !c.truth[i];
        fn += !hit && c.truth[i];
    }
    return tp + fp + fn == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

TEST_CASE("layout raster") {
    SUBCASE("blank page") {
        const auto r = detect::render_layout(page_of({}, 100, 50));
        CHECK(r.width == 200);
        CHECK(r.height == 100);
        CHECK(r.foreground_fraction() == 0.0);
        CHECK(std::all_of(r.pixels.begin(), r.pixels.end(), [](auto p) { return p == detect::kBackground; }));
    }
    SUBCASE("a cell covering a tenth of the page") {
        const auto r = detect::render_layout(page_of({cell(0, 0, 90, 100, 100)}, 100, 100));
        CHECK(std::abs(r.foreground_fraction() - 0.10) <= 0.01);
        CHECK(r.at(0, 0) == detect::kCellIntensity);
        CHECK(r.at(0, 199) == detect::kBackground);
    }
    SUBCASE("text does not reach the raster") {
        auto a = page_of({cell(0, 10, 10, 60, 20, "hello")});
        auto b = page_of({cell(0, 10, 10, 60, 20, "#####")});
        CHECK(detect::render_layout(a) == detect::render_layout(b));
    }
    SUBCASE("rules are drawn") {
        auto page = page_of({}, 100, 100);
        page.paths.push_back({{10, 50}, {90, 50}});
        const auto r = detect::render_layout(page, 1.0);
        CHECK(r.at(50, 50) == detect::kPathIntensity);
        CHECK(r.to_pgm().rfind("P5\n100 100\n255\n", 0) == 0);
    }
    SUBCASE("bad scale") {
        CHECK(error_code([] { detect::render_layout(page_of({}), 0); }) == "bad-scale");
        CHECK(error_code([] { detect::render_layout(page_of({}), -1); }) == "bad-scale");
    }
}

TEST_CASE("overlap labeling") {
    const std::vector<doc::TextCell> cells{cell(0, 0, 0, 10, 10), cell(1, 20, 0, 30, 10), cell(2, 40, 0, 50, 10)};
    SUBCASE("coverage against the threshold") {
        // covers all of cell 0, half of cell 1, none of cell 2
        const std::vector<Detection> d{det(-5, -5, 25, 15, 0.7)};
        CHECK(detect::overlap_labeling(cells, d, 0.5) == std::vector<bool>{true, true, false});
        CHECK(detect::overlap_labeling(cells, d, 0.5, 0.6) == std::vector<bool>{true, false, false});
        CHECK(detect::overlap_labeling(cells, d, 0.8) == std::vector<bool>{false, false, false});
        CHECK(detect::overlap_labeling(cells, d, 0.7) == std::vector<bool>{true, true, false});
    }
    SUBCASE("no detections") { CHECK(detect::overlap_labeling(cells, {}, 0) == std::vector<bool>{false, false, false}); }
}

TEST_CASE("confidence sweep") {
    SUBCASE("all detections correct") {
        const std::vector<doc::TextCell> cells{cell(0, 0, 0, 10, 10), cell(1, 20, 0, 30, 10)};
        const auto r = detect::sweep_confidence(cells, {det(0, 0, 10, 10, 0.3), det(20, 0, 30, 10, 0.9)}, {true, true});
        CHECK(r.best_f1 == 1.0);
        CHECK(r.best_threshold == 0.0);
    }
    SUBCASE("four detections, two of them wrong") {
        detect::SweepCase c;
        for (int i = 0; i < 4; ++i) c.cells.push_back(cell(i, 20.0 * i, 0, 20.0 * i + 10, 10));
        c.detections = {det(0, 0, 10, 10, 0.2), det(20, 0, 30, 10, 0.4), det(40, 0, 50, 10, 0.6), det(60, 0, 70, 10, 0.8)};
        c.truth = {false, false, true, true};
        const auto r = detect::sweep_confidence({c});
        std::vector<double> thresholds;
        for (const auto& p : r.points) thresholds.push_back(p.threshold);
        CHECK(thresholds == std::vector<double>{0, 0.2, 0.4, 0.6, 0.8, 1});
        for (const auto& p : r.points) CHECK(p.f1 == doctest::Approx(f1_at(c, p.threshold, 0.5)));
        CHECK(r.best_threshold == 0.6);
        CHECK(r.best_f1 == 1.0);
        CHECK(r.points[1].precision == 0.5);
        CHECK(r.points[5].recall == 0.0);
    }
    SUBCASE("no cells") {
        CHECK(error_code([] { detect::sweep_confidence({}, {}, {}); }) == "empty-input");
    }
    SUBCASE("truth and cells disagree in length") {
        CHECK(error_code([] { detect::sweep_confidence({cell(0, 0, 0, 1, 1)}, {}, {}); }) != "");
    }
    SUBCASE("nothing to find and nothing found") {
        const auto r = detect::sweep_confidence({cell(0, 0, 0, 10, 10)}, {}, {false});
        CHECK(r.best_f1 == 1.0);
    }
    SUBCASE("random cases against brute force") {
        Rng rng(12);
        for (int trial = 0; trial < 20; ++trial) {
            detect::SweepCase c;
            for (int i = 0; i < 30; ++i) {
                const double x = rng.uniform(0, 500), y = rng.uniform(0, 700);
                c.cells.push_back(cell(i, x, y, x + rng.uniform(5, 60), y + 10));
                c.truth.push_back(rng.chance(0.3));
            }
            for (int k = 0; k < 4; ++k) {
                const double x = rng.uniform(0, 400), y = rng.uniform(0, 600);
                c.detections.push_back(det(x, y, x + rng.uniform(20, 200), y + rng.uniform(20, 200),
                                           std::round(rng.uniform() * 10) / 10));
            }
            const auto r = detect::sweep_confidence({c});
            double best = -1;
            for (std::size_t i = 0; i < r.points.size(); ++i) {
                if (i) CHECK(r.points[i].threshold > r.points[i - 1].threshold);
                // raising the threshold can only remove positives
                if (i) CHECK(r.points[i].tp + r.points[i].fp <= r.points[i - 1].tp + r.points[i - 1].fp);
                CHECK(r.points[i].f1 == doctest::Approx(f1_at(c, r.points[i].threshold, 0.5)));
                best = std::max(best, r.points[i].f1);
            }
            CHECK(r.best_f1 == best);
        }
    }
}

TEST_CASE("heuristic table detector") {
    const detect::HeuristicTableDetector detector;
    SUBCASE("a 4x3 grid") {
        std::vector<doc::TextCell> cells;
        int id = 0;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 3; ++c) {
                cells.push_back(cell(id++, 100 + 120.0 * c, 500 - 14.0 * r, 160 + 120.0 * c, 510 - 14.0 * r, "12.5"));
            }
        }
        const auto d = detector.detect(page_of(cells));
        REQUIRE(d.size() == 1);
        CHECK(d[0].confidence > 0.5);
        for (const auto& c : cells) CHECK(c.bbox.intersection_area(d[0].bbox) == doctest::Approx(c.bbox.area()));
    }
    SUBCASE("running text") {
        std::vector<doc::TextCell> cells;
        for (int r = 0; r < 10; ++r) cells.push_back(cell(r, 72, 700 - 12.0 * r, 540, 710 - 12.0 * r, "words words"));
        CHECK(detector.detect(page_of(cells)).empty());
    }
    SUBCASE("empty page") { CHECK(detector.detect(page_of({})).empty()); }
}

TEST_CASE("detections json") {
    detect::DocumentDetections d{"doc", {{1, {det(1, 2, 3, 4, 0.5)}}, {2, {}}}};
    const std::string bytes = detect::serialize(d);
    CHECK(bytes.find("detections.v1") != std::string::npos);
    CHECK(detect::deserialize_detections(bytes) == d);
    CHECK(error_code([] { detect::deserialize_detections(R"({"schema":"other"})"); }) == "schema-violation");
}

TEST_CASE("external detector process") {
    testing::TempDir dir("detector");
    const auto script = dir.path() / "detector.sh";
    {
        std::ofstream f(script);
        f << "#!/bin/sh\n"
             "cat > \"$2\" <<'JSON'\n"
             R"({"schema":"detections.v1","schema_version":1,"doc_id":"page","pages":[{"page_number":1,"detections":[{"bbox":[0,0,50,50],"confidence":0.75,"class":"table"}]}]})"
             "\nJSON\n";
    }
    std::filesystem::permissions(script, std::filesystem::perms::owner_all);
    const detect::ProcessDetector detector(script.string());
    const auto d = detector.detect(page_of({cell(0, 10, 10, 20, 20)}));
    REQUIRE(d.size() == 1);
    CHECK(d[0].confidence == 0.75);
    CHECK(d[0].bbox == doc::BBox{0, 0, 50, 50});

    const detect::ProcessDetector failing("false");
    CHECK(error_code([&] { failing.detect(page_of({})); }) == "io-error");
}
