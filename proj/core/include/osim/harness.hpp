#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osim/config.hpp"
#include "osim/scenarios.hpp"

namespace osim::harness {

enum class ReportFormat { json, csv_summary };

inline constexpr const char* kCsvHeader = "scenario,status,max_violation,tolerance,seed,N";

io::Json report_to_json(const Report& report);

// json: canonical, sorted keys, trailing newline. csv_summary: header + one row.
std::string export_report(const Report& report, ReportFormat format);

struct RunOptions {
  bool timing = false;          // add wall_time_s to reports
  bool defaults_only = false;   // verify-all semantics
  std::optional<std::string> scenario;  // overrides the config's scenario
  unsigned threads = 0;         // 0: hardware concurrency, at most 4
};

struct RunEntry {
  std::string scenario;
  std::optional<Report> report;
  std::string error;  // non-empty when the scenario could not run
  std::string file;   // report file name inside the output directory
};

std::vector<RunEntry> run_batch(const std::vector<config::ExperimentConfig>& configs, const RunOptions& options);

// Every catalog scenario under its defaults, sharing seed, N and grids.
std::vector<RunEntry> run_all(const config::ExperimentConfig& cfg, const RunOptions& options);

// 1 if any entry errored, else 2 if any VIOLATED, else 3 if any INCONCLUSIVE, else 0.
int exit_code(const std::vector<RunEntry>& entries);

// Writes one report per entry, index.json and summary.csv; returns exit_code.
int write_outputs(std::vector<RunEntry>& entries, const std::string& out_dir);

}  // namespace osim::harness
