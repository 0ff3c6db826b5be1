#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xdlc/loop.hpp"

namespace xdlc {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One natural-language instruction to convert, with optional per-record
// environment constraints.
struct DatasetRecord {
  std::string id;
  std::string instruction;
  std::optional<EnvironmentConstraints> constraints;
};

// JSON Lines, one object per line: {"id", "instruction", "constraints"?}.
// Blank lines are skipped. Throws DatasetError (with the line number) on
// malformed lines, missing/empty fields, or duplicate ids; an empty dataset
// is an error.
std::vector<DatasetRecord> load_dataset_jsonl(const std::string& path);
std::vector<DatasetRecord> parse_dataset_jsonl(std::string_view text);

struct BatchSummary {
  int total = 0;
  int succeeded = 0;
  double success_rate = 0.0;
  struct {
    double mean = 0.0;
    double stddev = 0.0;  // population
    int min = 0;
    int max = 0;
  } verifier_calls;
  // Every error of every iteration of every conversion, by category.
  std::map<ErrorCategory, int> error_category_totals;
};

// Builds a fresh backend for one record. Batch conversions may run
// concurrently, so each record gets its own backend instance.
using BackendFactory =
    std::function<std::unique_ptr<GeneratorBackend>(const DatasetRecord&)>;

struct BatchResult {
  std::vector<ConversionTrace> traces;  // dataset order
  BatchSummary summary;
};

// Converts every record, scheduling onto at most `parallelism` workers.
// Per-record constraints override the default constraints. Failures
// (timeouts, backend errors) are outcomes inside the traces, never an abort.
// Output order matches dataset order regardless of scheduling.
BatchResult run_batch(const std::vector<DatasetRecord>& dataset,
                      const SchemaRegistry& reg,
                      const std::optional<EnvironmentConstraints>& default_constraints,
                      const BackendFactory& make_backend, const LoopConfig& cfg,
                      int parallelism = 1);

// Aggregates statistics over finished conversions; traces must be non-empty.
BatchSummary summarize(const std::vector<ConversionTrace>& traces);

// Plain-text report: experiment counts, mean/std and max/min verifier calls,
// and per-category error totals.
std::string render_table(const BatchSummary& summary);

std::string summary_to_json(const BatchSummary& summary);

// Writes <out_dir>/traces/<id>.json, <out_dir>/plans/<id>.xdl for successes,
// <out_dir>/summary.json and <out_dir>/table.txt. Record ids are sanitized
// for use as file names. Throws std::runtime_error on I/O failure.
void write_batch_outputs(const std::string& out_dir,
                         const std::vector<DatasetRecord>& dataset,
                         const BatchResult& result);

}  // namespace xdlc
