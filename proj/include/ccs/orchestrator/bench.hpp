#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ccs::orchestrator {

struct BenchRow {
    std::string stage;  // parse, ml-apply, assemble
    int workers = 1;
    double seconds = 0;
    double speedup = 1;
    std::size_t tasks = 0;
    /// Output multiset equals the single-worker run's.
    bool equivalent = true;
};

struct BenchOptions {
    /// Serialized model for the ml-apply and assemble stages; when absent a
    /// small model is trained on a synthetic corpus first.
    std::optional<std::string> model;
    /// Run each configuration this many times and keep the fastest.
    int repeats = 1;
};

/// Wall-clock time of each stage through the in-process broker at each
/// worker count. Parse and ml-apply run one task per page, assemble one task
/// per document.
std::vector<BenchRow> bench_scaling(const std::vector<std::string>& pdfs, const std::vector<int>& workers,
                                    const BenchOptions& opts = {});

/// CSV with header stage,workers,seconds,speedup.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace ccs::orchestrator
