#include "ccs/parser/parser.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"
#include "ccs/hash.hpp"

namespace ccs::parser {

doc::ParsedDocument normalize_document(const ExtractedDocument& extracted, const std::string& doc_id,
                                       const ParseConfig& cfg, std::string source_name, NormalizationReport* report) {
    cfg.normalization.check();
    if (extracted.pages.empty()) throw Error(errc::kParseFailure, "document has no pages");

    const std::size_t n = extracted.pages.size();
    doc::ParsedDocument out;
    out.doc_id = doc_id;
    out.source_name = std::move(source_name);
    out.pages.resize(n);
    std::vector<NormalizationReport> reports(n);

    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            out.pages[i] = normalize_cells(extracted.pages[i], cfg.normalization, &reports[i]);
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (report) {
        for (const auto& r : reports) *report += r;
    }

    auto violations = doc::validate(out);
    if (!violations.empty()) {
        throw Error(errc::kParseFailure, "normalized document is invalid: " + doc::to_string(violations.front()));
    }
    return out;
}

doc::ParsedDocument parse_document(std::string_view bytes, const ParseConfig& cfg, const ExtractionBackend* backend,
                                   std::string source_name, NormalizationReport* report) {
    static const PdfBackend kPdf;
    if (!backend) backend = &kPdf;
    ExtractedDocument extracted = backend->extract(bytes);
    return normalize_document(extracted, sha256_hex(bytes), cfg, std::move(source_name), report);
}

}  // namespace ccs::parser
