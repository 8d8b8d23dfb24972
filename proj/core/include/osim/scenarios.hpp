#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osim/config.hpp"
#include "osim/orderings.hpp"
#include "osim/status.hpp"
#include "osim/verdict.hpp"

namespace osim::harness {

enum class Method { monte_carlo, analytic_grid };

std::string_view to_string(Method m) noexcept;

struct ScenarioInfo {
  std::string id;
  std::string statement;                // compared vectors and relation, in words
  std::vector<std::string> hypotheses;  // hypothesis ids, in check order
  orderings::Relation relation;
  Method method;
};

// The fixed catalog of 37 theorem parts.
const std::vector<ScenarioInfo>& list_scenarios();

// UnknownScenario for ids outside the catalog.
const ScenarioInfo& lookup_scenario(std::string_view id);

struct HypothesisResult {
  std::string id;
  Status status;  // INCONCLUSIVE when the check itself could not run
  std::string detail;
};

struct Report {
  std::string scenario;
  io::Json config;  // effective parameters after defaults and overrides
  std::vector<HypothesisResult> hypotheses;
  Status verdict = Status::Inconclusive;
  OrderVerdict conclusion;
  io::Json diagnostics;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  std::size_t N = 0;
  std::optional<double> wall_time_s;
};

inline constexpr const char* kToolVersion = "osim 1.0.0";

struct VerifyOptions {
  // Ignore model/parameter overrides and keep only seed, N and grids.
  bool defaults_only = false;
};

// Hypothesis pre-checks, then the conclusion checker when all of them hold.
Report verify_scenario(const ScenarioInfo& scenario, const config::ExperimentConfig& cfg,
                       const VerifyOptions& options = {});

}  // namespace osim::harness
