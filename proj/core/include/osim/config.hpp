#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "osim/copulagen.hpp"
#include "osim/distributions.hpp"
#include "osim/json_io.hpp"
#include "osim/models.hpp"

namespace osim::config {

using io::Json;

struct GeneratorConfig {
  std::string name;
  std::vector<double> params;
};

struct ModelConfig {
  std::string type = "dsos";  // dsos | dgos | preset:<name>
  std::optional<int> n;
  std::optional<double> k;
  std::optional<std::vector<double>> m;
  std::optional<std::vector<double>> gamma;
  std::vector<double> preset_params;

  bool is_preset() const { return type.rfind("preset:", 0) == 0; }
  std::string preset_name() const { return is_preset() ? type.substr(7) : std::string(); }
};

struct GridConfig {
  std::optional<int> axis_points;            // disp_multi, per axis
  std::optional<int> analytic_points;        // quantile levels per law
  std::optional<std::vector<double>> times;  // dyn_hr history times
};

struct ExperimentConfig {
  std::optional<std::string> scenario;
  std::uint64_t seed = 0;
  std::size_t N = 100000;
  std::optional<GeneratorConfig> generator;
  std::optional<std::vector<Json>> distributions;
  std::optional<std::vector<Json>> distributions_g;
  std::optional<ModelConfig> model;
  std::optional<std::vector<double>> gamma;
  std::optional<std::vector<double>> gamma_prime;
  std::optional<int> index;
  std::optional<std::vector<int>> p;
  std::optional<std::vector<int>> q;
  bool reverse = false;
  std::string gr_n = "larger";  // larger | smaller
  GridConfig grids;
  Json raw;
};

// Reads and parses a JSON file; Io when unreadable, ConfigParse on bad JSON.
Json load_json_file(const std::string& path);

// One experiment. ConfigParse names the offending field.
ExperimentConfig parse_config(const Json& j);

// A config object, or one with "batch": [...] whose entries inherit the
// top-level fields.
std::vector<ExperimentConfig> parse_config_batch(const Json& j);

copulagen::GeneratorSpec make_generator(const GeneratorConfig& g);

// {"name": str, "params": [..]} or {"phr": {"base": {...}, "alpha": a}}.
distributions::DistributionSpec parse_distribution(const Json& j);

// Model for the `sample` subcommand.
using AnyModel = std::variant<models::DsosModel, models::DgosModel>;
AnyModel build_model(const ExperimentConfig& cfg, std::optional<int> n_override = std::nullopt);

}  // namespace osim::config
