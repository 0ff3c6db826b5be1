#include "xdlc/evalkit.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace xdlc {

namespace fs = std::filesystem;

namespace {

EnvironmentConstraints constraints_from_object(const nlohmann::json& obj, int line_no) {
  EnvironmentConstraints constraints;
  if (!obj.is_object()) {
    throw DatasetError("line " + std::to_string(line_no) +
                       ": \"constraints\" must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    std::set<std::string>* target = nullptr;
    if (key == "hardware") target = &constraints.hardware;
    else if (key == "reagents") target = &constraints.reagents;
    else {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": unknown constraints key '" + key + "'");
    }
    if (!value.is_array()) {
      throw DatasetError("line " + std::to_string(line_no) + ": constraints '" +
                         key + "' must be an array of strings");
    }
    for (const auto& item : value) {
      if (!item.is_string()) {
        throw DatasetError("line " + std::to_string(line_no) + ": constraints '" +
                           key + "' must be an array of strings");
      }
      target->insert(item.get<std::string>());
    }
  }
  return constraints;
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
              c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<DatasetRecord> parse_dataset_jsonl(std::string_view text) {
  std::vector<DatasetRecord> records;
  std::set<std::string> seen_ids;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": not valid JSON: " + e.what());
    }
    if (!parsed.is_object()) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": each record must be a JSON object");
    }

    DatasetRecord record;
    if (!parsed.contains("id") || !parsed["id"].is_string() ||
        parsed["id"].get<std::string>().empty()) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": record needs a non-empty string \"id\"");
    }
    record.id = parsed["id"].get<std::string>();
    if (!parsed.contains("instruction") || !parsed["instruction"].is_string() ||
        parsed["instruction"].get<std::string>().empty()) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": record needs a non-empty string \"instruction\"");
    }
    record.instruction = parsed["instruction"].get<std::string>();
    if (parsed.contains("constraints") && !parsed["constraints"].is_null()) {
      record.constraints = constraints_from_object(parsed["constraints"], line_no);
    }
    for (const auto& [key, value] : parsed.items()) {
      (void)value;
      if (key != "id" && key != "instruction" && key != "constraints") {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": unknown record key '" + key + "'");
      }
    }

    if (!seen_ids.insert(record.id).second) {
      throw DatasetError("line " + std::to_string(line_no) + ": duplicate id '" +
                         record.id + "'");
    }
    records.push_back(std::move(record));
  }

  if (records.empty()) throw DatasetError("dataset contains no records");
  return records;
}

std::vector<DatasetRecord> load_dataset_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read dataset file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_jsonl(buf.str());
}

BatchResult run_batch(const std::vector<DatasetRecord>& dataset,
                      const SchemaRegistry& reg,
                      const std::optional<EnvironmentConstraints>& default_constraints,
                      const BackendFactory& make_backend, const LoopConfig& cfg,
                      int parallelism) {
  if (dataset.empty()) throw DatasetError("dataset contains no records");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");

  BatchResult result;
  result.traces.resize(dataset.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= dataset.size()) return;
      const DatasetRecord& record = dataset[i];
      const auto& constraints =
          record.constraints ? record.constraints : default_constraints;
      try {
        std::unique_ptr<GeneratorBackend> backend = make_backend(record);
        result.traces[i] =
            convert(record.instruction, reg, constraints, *backend, cfg);
      } catch (const std::exception& e) {
        // A record that cannot even start still yields an outcome.
        ConversionTrace trace;
        trace.instruction = record.instruction;
        trace.config = cfg;
        trace.schema_version = reg.version();
        trace.constraints_applied = constraints.has_value();
        trace.outcome = Outcome::BackendFailure;
        trace.failure_reason = e.what();
        result.traces[i] = std::move(trace);
      }
    }
  };

  int workers = std::min<int>(parallelism, static_cast<int>(dataset.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  result.summary = summarize(result.traces);
  return result;
}

BatchSummary summarize(const std::vector<ConversionTrace>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("summarize needs at least one trace");
  }

  BatchSummary summary;
  summary.total = static_cast<int>(traces.size());

  double sum = 0.0;
  summary.verifier_calls.min = std::numeric_limits<int>::max();
  summary.verifier_calls.max = 0;
  for (const ConversionTrace& trace : traces) {
    if (trace.outcome == Outcome::Success) ++summary.succeeded;
    int calls = verifier_call_count(trace);
    sum += calls;
    summary.verifier_calls.min = std::min(summary.verifier_calls.min, calls);
    summary.verifier_calls.max = std::max(summary.verifier_calls.max, calls);
    for (const IterationRecord& record : trace.records) {
      for (const VerificationError& e : record.report.errors) {
        ++summary.error_category_totals[e.category];
      }
    }
  }
  summary.success_rate = static_cast<double>(summary.succeeded) / summary.total;
  summary.verifier_calls.mean = sum / summary.total;

  double variance = 0.0;
  for (const ConversionTrace& trace : traces) {
    double d = verifier_call_count(trace) - summary.verifier_calls.mean;
    variance += d * d;
  }
  summary.verifier_calls.stddev = std::sqrt(variance / summary.total);
  return summary;
}

std::string render_table(const BatchSummary& summary) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "Verifier analysis\n";
  out << "-----------------\n";
  out << "experiments                  : " << summary.total << "\n";
  out << "plans generated              : " << summary.succeeded << "/"
      << summary.total << " (" << std::setprecision(1)
      << summary.success_rate * 100.0 << "%)\n"
      << std::setprecision(2);
  out << "verifier calls (avg +/- std) : " << summary.verifier_calls.mean
      << " +/- " << summary.verifier_calls.stddev << "\n";
  out << "verifier calls (max/min)     : " << summary.verifier_calls.max << "/"
      << summary.verifier_calls.min << "\n";
  out << "errors caught by category:\n";
  if (summary.error_category_totals.empty()) {
    out << "  (none)\n";
  } else {
    for (const auto& [category, count] : summary.error_category_totals) {
      out << "  - " << category_name(category) << " [" << count << "]\n";
    }
  }
  return out.str();
}

std::string summary_to_json(const BatchSummary& summary) {
  nlohmann::ordered_json j;
  j["total"] = summary.total;
  j["succeeded"] = summary.succeeded;
  j["success_rate"] = summary.success_rate;
  j["verifier_calls"] = {
      {"mean", summary.verifier_calls.mean},
      {"std", summary.verifier_calls.stddev},
      {"min", summary.verifier_calls.min},
      {"max", summary.verifier_calls.max},
  };
  nlohmann::ordered_json totals = nlohmann::ordered_json::object();
  for (const auto& [category, count] : summary.error_category_totals) {
    totals[std::string(category_name(category))] = count;
  }
  j["error_category_totals"] = std::move(totals);
  return j.dump(2);
}

void write_batch_outputs(const std::string& out_dir,
                         const std::vector<DatasetRecord>& dataset,
                         const BatchResult& result) {
  if (dataset.size() != result.traces.size()) {
    throw std::invalid_argument("dataset and traces differ in length");
  }
  fs::path root(out_dir);
  fs::create_directories(root / "traces");
  fs::create_directories(root / "plans");

  for (size_t i = 0; i < dataset.size(); ++i) {
    const std::string name = sanitize_id(dataset[i].id);
    write_file(root / "traces" / (name + ".json"), trace_to_json(result.traces[i]));
    if (result.traces[i].outcome == Outcome::Success) {
      write_file(root / "plans" / (name + ".xdl"), result.traces[i].final_plan + "\n");
    }
  }
  write_file(root / "summary.json", summary_to_json(result.summary));
  write_file(root / "table.txt", render_table(result.summary));
}

}  // namespace xdlc
