#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "lazysdp/diagnostics.hpp"

namespace lazysdp {

struct IterationRecord;
struct SolveStats;

// Line-delimited JSON trace: one "iteration" record per step, then the
// verification summary (per-iteration lemma checks and the amortization
// report) appended after the run. An empty path disables writing.
class TraceWriter {
  public:
    explicit TraceWriter(const std::string& path);
    ~TraceWriter();

    void write_iteration(const IterationRecord& rec);
    void write_lemma_checks(const std::vector<LemmaCheckRecord>& checks);
    void write_amortization(const AmortizationReport& rep);
    void write_summary(const SolveStats& stats);

    bool enabled() const { return out_.is_open(); }

  private:
    std::ofstream out_;
};

}  // namespace lazysdp
