#include "osim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "osim/error.hpp"

namespace osim::harness {

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? io::format_double(v) : ""; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Report run_one(const config::ExperimentConfig& cfg, const std::string& id, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Report r = verify_scenario(lookup_scenario(id), cfg, VerifyOptions{options.defaults_only});
  if (options.timing) {
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

// Parallel map over jobs; results keep the input order.
std::vector<RunEntry> run_jobs(const std::vector<std::pair<const config::ExperimentConfig*, std::string>>& jobs,
                               const RunOptions& options) {
  std::vector<RunEntry> out(jobs.size());
  unsigned threads = options.threads ? options.threads : std::min(4u, std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      auto& e = out[j];
      e.scenario = jobs[j].second;
      try {
        e.report = run_one(*jobs[j].first, jobs[j].second, options);
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

io::Json report_to_json(const Report& r) {
  io::Json j;
  j["scenario"] = r.scenario;
  j["config"] = r.config;
  j["hypotheses"] = io::Json::array();
  for (const auto& h : r.hypotheses) {
    j["hypotheses"].push_back({{"id", h.id}, {"status", std::string(to_string(h.status))}, {"detail", h.detail}});
  }
  j["verdict"] = std::string(to_string(r.verdict));
  j["conclusion"] = io::to_json(r.conclusion);
  j["diagnostics"] = r.diagnostics.is_null() ? io::Json::object() : r.diagnostics;
  j["notes"] = r.notes;
  j["seed"] = r.seed;
  j["N"] = r.N;
  j["tool_version"] = kToolVersion;
  if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j;
}

std::string export_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::json) return io::canonical_dump(report_to_json(r)) + "\n";
  std::string row = r.scenario + "," + std::string(to_string(r.verdict)) + "," +
                    csv_number(r.conclusion.max_violation) + "," + csv_number(r.conclusion.tolerance) + "," +
                    std::to_string(r.seed) + "," + std::to_string(r.N);
  return std::string(kCsvHeader) + "\n" + row + "\n";
}

std::vector<RunEntry> run_batch(const std::vector<config::ExperimentConfig>& configs, const RunOptions& options) {
  std::vector<std::pair<const config::ExperimentConfig*, std::string>> jobs;
  for (const auto& c : configs) {
    const auto id = options.scenario ? options.scenario : c.scenario;
    if (!id) throw Error(ErrorKind::ConfigParse, "field \"scenario\": missing (or pass --scenario)");
    jobs.emplace_back(&c, *id);
  }
  return run_jobs(jobs, options);
}

std::vector<RunEntry> run_all(const config::ExperimentConfig& cfg, const RunOptions& options) {
  std::vector<std::pair<const config::ExperimentConfig*, std::string>> jobs;
  for (const auto& s : list_scenarios()) jobs.emplace_back(&cfg, s.id);
  RunOptions o = options;
  o.defaults_only = true;
  return run_jobs(jobs, o);
}

int exit_code(const std::vector<RunEntry>& entries) {
  bool error = false;
  bool violated = false;
  bool inconclusive = false;
  for (const auto& e : entries) {
    if (!e.report) {
      error = true;
      continue;
    }
    violated |= e.report->verdict == Status::Violated;
    inconclusive |= e.report->verdict == Status::Inconclusive;
  }
  if (error) return 1;
  if (violated) return 2;
  if (inconclusive) return 3;
  return 0;
}

int write_outputs(std::vector<RunEntry>& entries, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir + ": " + ec.message());
  std::map<std::string, int> seen;
  io::Json index;
  index["entries"] = io::Json::array();
  std::string csv = std::string(kCsvHeader) + "\n";
  for (auto& e : entries) {
    const int k = seen[e.scenario]++;
    e.file = e.scenario + (k ? "-" + std::to_string(k + 1) : "") + ".json";
    io::Json item;
    item["scenario"] = e.scenario;
    if (e.report) {
      write_file(fs::path(out_dir) / e.file, export_report(*e.report, ReportFormat::json));
      item["report"] = e.file;
      item["status"] = std::string(to_string(e.report->verdict));
      const auto line = export_report(*e.report, ReportFormat::csv_summary);
      csv += line.substr(line.find('\n') + 1);
    } else {
      item["status"] = "ERROR";
      item["error"] = e.error;
    }
    index["entries"].push_back(item);
  }
  const int code = exit_code(entries);
  index["exit_code"] = code;
  index["tool_version"] = kToolVersion;
  write_file(fs::path(out_dir) / "index.json", io::canonical_dump(index) + "\n");
  write_file(fs::path(out_dir) / "summary.csv", csv);
  return code;
}

}  // namespace osim::harness
