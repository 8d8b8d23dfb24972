#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "osim/config.hpp"
#include "osim/copulagen.hpp"
#include "osim/error.hpp"
#include "osim/harness.hpp"
#include "osim/json_io.hpp"
#include "osim/models.hpp"

namespace {

using namespace osim;

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorKind::ParamOutOfDomain, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_list(bool as_json) {
  for (const auto& s : harness::list_scenarios()) {
    if (as_json) {
      io::Json j;
      j["id"] = s.id;
      j["statement"] = s.statement;
      j["hypotheses"] = s.hypotheses;
      j["relation"] = std::string(orderings::to_string(s.relation));
      j["method"] = std::string(harness::to_string(s.method));
      std::cout << io::canonical_dump(j, -1) << "\n";
    } else {
      std::string hyps;
      for (const auto& h : s.hypotheses) hyps += (hyps.empty() ? "" : "; ") + h;
      std::cout << s.id << "\t" << orderings::to_string(s.relation) << "\t" << harness::to_string(s.method) << "\t"
                << s.statement << "\t[" << hyps << "]\n";
    }
  }
  return 0;
}

int cmd_gen_check(const std::string& name, const std::string& params, const std::string& condition,
                  std::optional<int> n) {
  const auto gen = copulagen::builtin_generator(name, parse_csv_numbers(params));
  std::vector<copulagen::Condition> conds;
  if (condition == "all") {
    for (auto c : {copulagen::Condition::R_RATIO_POS_INC, copulagen::Condition::R_RATIO_INC,
                   copulagen::Condition::H_RATIO_NEG_DEC, copulagen::Condition::H_RATIO_DEC,
                   copulagen::Condition::R_DEC, copulagen::Condition::GR_DIFF_POS_INC}) {
      if (c == copulagen::Condition::GR_DIFF_POS_INC && !n) continue;
      conds.push_back(c);
    }
  } else {
    conds.push_back(copulagen::parse_condition(condition));
  }
  for (auto c : conds) {
    std::optional<int> nn;
    if (c == copulagen::Condition::GR_DIFF_POS_INC) {
      if (!n) throw Error(ErrorKind::ParamOutOfDomain, "GR_DIFF_POS_INC needs --n");
      nn = n;
    }
    std::cout << io::canonical_dump(io::to_json(copulagen::check_generator_condition(gen, c, nn)), -1) << "\n";
  }
  return 0;
}

int cmd_sample(const std::string& model, const std::string& config_path, std::size_t draws,
               std::optional<std::uint64_t> seed, std::optional<int> n, const std::string& out_path,
               const std::string& route) {
  io::Json j = io::Json::object();
  std::string type;
  if (std::filesystem::is_regular_file(model)) {
    j = config::load_json_file(model);
  } else {
    type = model;
    if (!config_path.empty()) j = config::load_json_file(config_path);
  }
  if (seed) j["seed"] = *seed;
  if (!j.contains("seed")) throw Error(ErrorKind::ConfigParse, "field \"seed\": missing (or pass --seed)");
  if (!type.empty()) j["model"]["type"] = type;
  const auto cfg = config::parse_config(j);
  const auto any = config::build_model(cfg, n);
  const auto wroute = route == "copula_min" ? models::WRoute::CopulaMin : models::WRoute::Inversion;
  if (route != "inversion" && route != "copula_min") {
    throw Error(ErrorKind::ParamOutOfDomain, "route must be inversion or copula_min");
  }

  SampleMatrix sample;
  if (wroute == models::WRoute::Inversion) {
    sample = std::holds_alternative<models::DsosModel>(any)
                 ? models::sample_dsos_batch(std::get<models::DsosModel>(any), draws, cfg.seed)
                 : models::sample_dgos_batch(std::get<models::DgosModel>(any), draws, cfg.seed);
  } else {
    for (std::size_t i = 0; i < draws; ++i) {
      RandomStream rng(derive_seed(cfg.seed, i));
      const auto d = std::holds_alternative<models::DsosModel>(any)
                         ? models::sample_dsos(std::get<models::DsosModel>(any), rng, wroute)
                         : models::sample_dgos(std::get<models::DgosModel>(any), rng, wroute);
      if (sample.cols == 0) sample = SampleMatrix(draws, d.x.size());
      for (std::size_t c = 0; c < d.x.size(); ++c) sample.at(i, c) = d.x[c];
      sample.clamped[i] = d.clamped;
    }
  }

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot write " + out_path);
    os = &file;
  }
  std::string line;
  for (std::size_t c = 0; c < sample.cols; ++c) line += (c ? ",x" : "x") + std::to_string(c + 1);
  *os << line << "\n";
  for (std::size_t r = 0; r < sample.rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < sample.cols; ++c) line += (c ? "," : "") + io::format_double(sample.at(r, c));
    *os << line << "\n";
  }
  return 0;
}

std::vector<config::ExperimentConfig> load_configs(const std::string& path) {
  if (path.empty()) {
    config::ExperimentConfig c;
    c.seed = 42;
    return {c};
  }
  return config::parse_config_batch(config::load_json_file(path));
}

void print_summary(const std::vector<harness::RunEntry>& entries) {
  for (const auto& e : entries) {
    if (e.report) {
      std::cout << e.scenario << "\t" << to_string(e.report->verdict) << "\t"
                << io::format_double(e.report->conclusion.max_violation) << "\t"
                << io::format_double(e.report->conclusion.tolerance) << "\n";
    } else {
      std::cout << e.scenario << "\tERROR\t" << e.error << "\n";
    }
  }
}

int cmd_verify(const std::string& scenario, const std::string& config_path, const std::string& out_dir,
               bool timing, const std::string& format) {
  auto configs = load_configs(config_path);
  harness::RunOptions opt;
  opt.timing = timing;
  if (!scenario.empty()) opt.scenario = scenario;
  auto entries = harness::run_batch(configs, opt);
  int code = 0;
  if (out_dir.empty()) {
    for (const auto& e : entries) {
      if (e.report) {
        std::cout << harness::export_report(*e.report, format == "csv" ? harness::ReportFormat::csv_summary
                                                                       : harness::ReportFormat::json);
      } else {
        std::cerr << e.scenario << ": " << e.error << "\n";
      }
    }
    code = harness::exit_code(entries);
  } else {
    code = harness::write_outputs(entries, out_dir);
    print_summary(entries);
  }
  return code;
}

int cmd_verify_all(const std::string& config_path, const std::string& out_dir, bool timing) {
  const auto configs = load_configs(config_path);
  if (configs.size() != 1) throw Error(ErrorKind::ConfigParse, "field \"batch\": verify-all takes a single config");
  harness::RunOptions opt;
  opt.timing = timing;
  auto entries = harness::run_all(configs[0], opt);
  const int code = harness::write_outputs(entries, out_dir);
  print_summary(entries);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osim: ordered random vectors under Archimedean copulas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(osim::harness::kToolVersion));

  auto* list = app.add_subcommand("list", "Print the theorem scenario catalog");
  bool list_json = false;
  list->add_flag("--json", list_json, "One JSON object per line");

  auto* gen = app.add_subcommand("gen", "Generator utilities");
  gen->require_subcommand(1);
  auto* check = gen->add_subcommand("check", "Check a generator condition on the default grid");
  std::string g_name;
  std::string g_params;
  std::string g_cond = "all";
  std::optional<int> g_n;
  check->add_option("--name", g_name, "Generator name")->required();
  check->add_option("--params", g_params, "Comma-separated parameters");
  check->add_option("--condition", g_cond, "Condition id or 'all'");
  check->add_option("--n", g_n, "Dimension for GR_DIFF_POS_INC");

  auto* sample = app.add_subcommand("sample", "Draw ordered vectors as CSV");
  std::string s_model;
  std::string s_config;
  std::size_t s_draws = 1000;
  std::optional<std::uint64_t> s_seed;
  std::optional<int> s_n;
  std::string s_out;
  std::string s_route = "inversion";
  sample->add_option("--model", s_model, "Model spec JSON, or dsos|dgos|preset:<name> with --config")->required();
  sample->add_option("--config", s_config, "Config JSON with generator and distributions");
  sample->add_option("--draws", s_draws, "Number of draws");
  sample->add_option("--seed", s_seed, "Master seed (overrides the spec)");
  sample->add_option("--n", s_n, "Vector length");
  sample->add_option("--out", s_out, "Output CSV (default stdout)");
  sample->add_option("--route", s_route, "W sampler: inversion or copula_min");

  auto* verify = app.add_subcommand("verify", "Verify one scenario (or a batch config)");
  std::string v_scenario;
  std::string v_config;
  std::string v_out;
  std::string v_format = "json";
  bool v_timing = false;
  verify->add_option("--scenario", v_scenario, "Scenario id, e.g. T4.4a");
  verify->add_option("--config", v_config, "Experiment config JSON");
  verify->add_option("--out", v_out, "Output directory (default: print the report)");
  verify->add_option("--format", v_format, "Printed format without --out: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  verify->add_flag("--timing", v_timing, "Record wall time in reports");

  auto* all = app.add_subcommand("verify-all", "Verify every catalog scenario under its defaults");
  std::string a_config;
  std::string a_out;
  bool a_timing = false;
  all->add_option("--config", a_config, "Config JSON supplying seed, N and grids");
  all->add_option("--out", a_out, "Output directory")->required();
  all->add_flag("--timing", a_timing, "Record wall time in reports");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) return cmd_list(list_json);
    if (*check) return cmd_gen_check(g_name, g_params, g_cond, g_n);
    if (*sample) return cmd_sample(s_model, s_config, s_draws, s_seed, s_n, s_out, s_route);
    if (*verify) return cmd_verify(v_scenario, v_config, v_out, v_timing, v_format);
    if (*all) return cmd_verify_all(a_config, a_out, a_timing);
  } catch (const std::exception& e) {
    std::cerr << "osim: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
