#pragma once

// Experiment records: a persisted, seed-reproducible result row. Records
// carry a full parameter echo; the `results` object is a deterministic
// function of (subcommand, params, seed) on one platform, while timestamps
// and runtimes live outside it. Writes go through a temp file + rename.

#include <json.hpp>

#include <filesystem>
#include <string>

namespace vinlab {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ExperimentRecord {
  std::string timestamp;  // ISO-8601 UTC
  std::string version = kArtifactVersion;
  std::string subcommand;
  nlohmann::ordered_json params;
  nlohmann::ordered_json results;
  nlohmann::ordered_json convergence;  // flags, optional
  double runtime_seconds = 0;

  nlohmann::ordered_json to_json() const;
  static ExperimentRecord from_json(const nlohmann::ordered_json& j);
};

std::string now_iso8601_utc();

// temp-file + rename; parent directories created on demand
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

// single-record JSON file
void write_record(const std::filesystem::path& path, const ExperimentRecord& rec);
ExperimentRecord read_record(const std::filesystem::path& path);

// append-only JSONL log, rewritten atomically
void append_record_jsonl(const std::filesystem::path& path, const ExperimentRecord& rec);
std::vector<ExperimentRecord> read_records_jsonl(const std::filesystem::path& path);

// tidy CSV + a declarative plot description for a homogeneous record set
struct PlotData {
  std::string csv;
  nlohmann::ordered_json description;
};

struct EmptySelection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// kinds: "growth" (log N vs log J with reference slopes s and 2s - n(n+1)/2),
// "vp-scan" (log 1/delta vs log max ratio), "threshold" (Delta vs omega_1 - 1)
PlotData emit_plotdata(const std::vector<ExperimentRecord>& records, const std::string& kind);

}  // namespace vinlab
