#include "osim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "osim/error.hpp"

namespace osim::config {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ConfigParse, "field \"" + field + "\": " + what);
}

double get_number(const Json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::vector<double> get_numbers(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> get_ints(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Json> get_dist_list(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of distribution specs");
  std::vector<Json> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string name = field + "[" + std::to_string(i) + "]";
    try {
      (void)parse_distribution(j[i]);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ConfigParse) throw;
      fail(name, e.what());
    }
    out.push_back(j[i]);
  }
  return out;
}

GeneratorConfig parse_generator(const Json& j) {
  if (!j.is_object()) fail("generator", "expected an object");
  if (!j.contains("name") || !j["name"].is_string()) fail("generator.name", "missing or not a string");
  GeneratorConfig g;
  g.name = j["name"].get<std::string>();
  if (j.contains("params")) g.params = get_numbers(j["params"], "generator.params");
  try {
    (void)make_generator(g);
  } catch (const Error& e) {
    fail("generator", e.what());
  }
  return g;
}

ModelConfig parse_model(const Json& j) {
  if (!j.is_object()) fail("model", "expected an object");
  ModelConfig m;
  static const std::set<std::string> known = {"type", "n", "k", "m", "gamma", "preset_params"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) fail("model." + it.key(), "unknown field");
  }
  if (j.contains("type")) {
    if (!j["type"].is_string()) fail("model.type", "expected a string");
    m.type = j["type"].get<std::string>();
    if (m.type != "dsos" && m.type != "dgos" && !m.is_preset()) {
      fail("model.type", "expected dsos, dgos or preset:<name>");
    }
  }
  if (j.contains("n")) {
    m.n = get_int(j["n"], "model.n");
    if (*m.n < 1) fail("model.n", "must be >= 1");
  }
  if (j.contains("k")) m.k = get_number(j["k"], "model.k");
  if (j.contains("m")) m.m = get_numbers(j["m"], "model.m");
  if (j.contains("gamma")) m.gamma = get_numbers(j["gamma"], "model.gamma");
  if (j.contains("preset_params")) m.preset_params = get_numbers(j["preset_params"], "model.preset_params");
  return m;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigParse, path + ": " + e.what());
  }
}

copulagen::GeneratorSpec make_generator(const GeneratorConfig& g) { return copulagen::builtin_generator(g.name, g.params); }

distributions::DistributionSpec parse_distribution(const Json& j) {
  if (!j.is_object()) fail("distributions", "expected an object");
  if (j.contains("phr")) {
    const auto& p = j["phr"];
    if (!p.is_object() || !p.contains("base") || !p.contains("alpha")) fail("phr", "expected {\"base\": {...}, \"alpha\": a}");
    return distributions::make_phr(parse_distribution(p["base"]), get_number(p["alpha"], "phr.alpha"));
  }
  if (!j.contains("name") || !j["name"].is_string()) fail("distributions.name", "missing or not a string");
  std::vector<double> params;
  if (j.contains("params")) params = get_numbers(j["params"], "distributions.params");
  return distributions::builtin_distribution(j["name"].get<std::string>(), params);
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  static const std::set<std::string> known = {"seed",  "N",          "generator", "distributions", "distributions_g",
                                              "model", "scenario",   "grids",     "gamma",         "gamma_prime",
                                              "index", "p",          "q",         "reverse",       "gr_n",
                                              "batch", "description"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) fail(it.key(), "unknown field");
  }
  ExperimentConfig c;
  c.raw = j;
  if (!j.contains("seed")) fail("seed", "missing");
  if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("N")) {
    if (!j["N"].is_number_unsigned()) fail("N", "expected a positive integer");
    c.N = j["N"].get<std::size_t>();
    if (c.N < 1000) fail("N", "must be >= 1000");
  }
  if (j.contains("scenario")) {
    if (!j["scenario"].is_string()) fail("scenario", "expected a string");
    c.scenario = j["scenario"].get<std::string>();
  }
  if (j.contains("generator")) c.generator = parse_generator(j["generator"]);
  if (j.contains("distributions")) c.distributions = get_dist_list(j["distributions"], "distributions");
  if (j.contains("distributions_g")) c.distributions_g = get_dist_list(j["distributions_g"], "distributions_g");
  if (j.contains("model")) c.model = parse_model(j["model"]);
  if (j.contains("gamma")) c.gamma = get_numbers(j["gamma"], "gamma");
  if (j.contains("gamma_prime")) c.gamma_prime = get_numbers(j["gamma_prime"], "gamma_prime");
  if (j.contains("index")) c.index = get_int(j["index"], "index");
  if (j.contains("p")) c.p = get_ints(j["p"], "p");
  if (j.contains("q")) c.q = get_ints(j["q"], "q");
  if (j.contains("reverse")) {
    if (!j["reverse"].is_boolean()) fail("reverse", "expected a boolean");
    c.reverse = j["reverse"].get<bool>();
  }
  if (j.contains("gr_n")) {
    if (!j["gr_n"].is_string()) fail("gr_n", "expected \"larger\" or \"smaller\"");
    c.gr_n = j["gr_n"].get<std::string>();
    if (c.gr_n != "larger" && c.gr_n != "smaller") fail("gr_n", "expected \"larger\" or \"smaller\"");
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    if (!g.is_object()) fail("grids", "expected an object");
    for (auto it = g.begin(); it != g.end(); ++it) {
      const std::string key = it.key();
      if (key == "axis_points") {
        c.grids.axis_points = get_int(*it, "grids.axis_points");
      } else if (key == "analytic_points") {
        c.grids.analytic_points = get_int(*it, "grids.analytic_points");
      } else if (key == "times") {
        c.grids.times = get_numbers(*it, "grids.times");
      } else {
        fail("grids." + key, "unknown field");
      }
    }
  }
  return c;
}

std::vector<ExperimentConfig> parse_config_batch(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  if (!j.contains("batch")) return {parse_config(j)};
  if (!j["batch"].is_array() || j["batch"].empty()) fail("batch", "expected a non-empty array");
  Json base = j;
  base.erase("batch");
  std::vector<ExperimentConfig> out;
  for (std::size_t i = 0; i < j["batch"].size(); ++i) {
    const auto& entry = j["batch"][i];
    if (!entry.is_object()) fail("batch[" + std::to_string(i) + "]", "expected an object");
    if (entry.contains("batch")) fail("batch[" + std::to_string(i) + "].batch", "nested batches are not supported");
    Json merged = base;
    for (auto it = entry.begin(); it != entry.end(); ++it) merged[it.key()] = it.value();
    try {
      out.push_back(parse_config(merged));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigParse, "batch[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

AnyModel build_model(const ExperimentConfig& cfg, std::optional<int> n_override) {
  const auto gen = cfg.generator ? make_generator(*cfg.generator) : copulagen::builtin_generator("independence", {});
  std::vector<distributions::DistributionSpec> dists;
  if (cfg.distributions) {
    for (const auto& d : *cfg.distributions) dists.push_back(parse_distribution(d));
  } else {
    dists.push_back(distributions::builtin_distribution("exponential", {1.0}));
  }
  const ModelConfig mc = cfg.model.value_or(ModelConfig{});
  std::optional<int> n = n_override ? n_override : mc.n;

  if (mc.type == "dsos") {
    const int len = n.value_or(static_cast<int>(dists.size()));
    if (dists.size() == 1) dists.assign(static_cast<std::size_t>(len), dists[0]);
    if (static_cast<int>(dists.size()) < len) {
      throw Error(ErrorKind::LengthMismatch, "dsos needs " + std::to_string(len) + " distributions, got " +
                                                 std::to_string(dists.size()));
    }
    dists.resize(static_cast<std::size_t>(len));
    return models::DsosModel(dists, gen);
  }
  if (mc.is_preset()) {
    return models::dgos_from_preset(mc.preset_name(), mc.preset_params, dists[0], gen);
  }
  if (mc.gamma) return models::DgosModel(dists[0], models::dgos_params_from_gamma(*mc.gamma), gen);
  const int len = n.value_or(3);
  std::vector<double> m = mc.m.value_or(std::vector<double>(static_cast<std::size_t>(std::max(len - 1, 0)), 0.0));
  return models::DgosModel(dists[0], models::dgos_params(len, mc.k.value_or(1.0), m), gen);
}

}  // namespace osim::config
