// Acceptance run: one PASS/FAIL line per criterion, details indented below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "osim/copulagen.hpp"
#include "osim/distributions.hpp"
#include "osim/harness.hpp"
#include "osim/models.hpp"
#include "osim/orderings.hpp"
#include "support/oracles.hpp"

using namespace osim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("FAILED " + what);
    }
  }
  void info(const std::string& what) { details.push_back(what); }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

copulagen::GeneratorSpec gen(const oracle::Gen& g) { return copulagen::builtin_generator(g.name, g.params); }
distributions::DistributionSpec dist(const std::string& name, std::vector<double> p) {
  return distributions::builtin_distribution(name, p);
}

const std::vector<oracle::Gen> kGens = {{"independence", {}}, {"clayton", {2.0}}, {"gumbel", {1.5}},
                                        {"ex61", {0.1}},      {"ex62", {2.0}},    {"ex63", {1.5}}};

double se_of_mean(const std::vector<double>& v) {
  const double m = oracle::mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1.0) / v.size());
}

// 1. Generator golden values.
Outcome generator_golden() {
  Outcome o;
  const auto& grid = copulagen::default_grid();
  for (double th : {0.5, 1.0}) {
    const auto g = copulagen::builtin_generator("ex61", {th});
    double worst = 0.0;
    for (double u : grid) {
      worst = std::max(worst, std::abs(copulagen::condition_functional(g, copulagen::Condition::R_RATIO_INC, {}, u) -
                                       oracle::ex61_r_ratio(u)));
    }
    o.expect(worst <= 1e-9, fmt("ex61 theta=%g uR'/R max error %.3g", th, worst));
    o.expect(copulagen::check_generator_condition(g, copulagen::Condition::R_RATIO_POS_INC, {}).status == Status::Holds,
             fmt("ex61 theta=%g R_RATIO_POS_INC", th));
  }
  for (double th : {1.0, 2.0}) {
    const auto g = copulagen::builtin_generator("ex62", {th});
    double worst = 0.0;
    for (double u : grid) {
      const double ref = oracle::ex62_h_ratio(u);
      worst = std::max(worst, std::abs(copulagen::condition_functional(g, copulagen::Condition::H_RATIO_DEC, {}, u) - ref));
    }
    o.expect(worst <= 1e-9, fmt("ex62 theta=%g uH'/H max error %.3g", th, worst));
    o.expect(copulagen::check_generator_condition(g, copulagen::Condition::H_RATIO_NEG_DEC, {}).status == Status::Holds,
             fmt("ex62 theta=%g H_RATIO_NEG_DEC", th));
  }
  for (double th : {0.4, 0.5, 0.6}) {
    const auto g = copulagen::builtin_generator("ex63", {th});
    double worst = 0.0;
    for (double u : grid) {
      const auto d = copulagen::diagnostics(g, u);
      worst = std::max(worst, std::abs(d.G / d.R - oracle::ex63_g_over_r(th, u)));
    }
    o.expect(worst <= 1e-9, fmt("ex63 theta=%g G/R max error %.3g", th, worst));
    for (int n : {2, 3, 5}) {
      o.expect(copulagen::check_generator_condition(g, copulagen::Condition::GR_DIFF_POS_INC, n).status == Status::Holds,
               fmt("ex63 theta=%g GR_DIFF_POS_INC n=%g", th, n));
    }
  }
  return o;
}

// 2. First DSOS coordinate against phi(n psi(Fbar_1(t))).
Outcome sampler_fidelity() {
  Outcome o;
  const std::size_t N = 10000;
  const double bound = orderings::dkw_bound(N);
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (const auto& g : kGens) {
    for (const auto& base : {dist("exponential", {1.0}), dist("weibull", {0.5, 1.0})}) {
      for (int n : {2, 5}) {
        const models::DsosModel m(std::vector<distributions::DistributionSpec>(n, base), gen(g));
        const auto x1 = models::sample_dsos_batch(m, N, ++seed).column(0);
        const double ks = orderings::ks_statistic(
            x1, [&](double t) { return 1.0 - oracle::min_survival(g, n, base.survival(t)); });
        worst = std::max(worst, ks);
        o.expect(ks < bound, g.name + " " + base.describe() + " n=" + std::to_string(n) + fmt(" KS %.4g", ks));
      }
    }
  }
  o.info(fmt("worst KS %.4g, DKW 99%% bound %.4g", worst, bound));
  return o;
}

// 3. W routes.
Outcome route_equivalence() {
  Outcome o;
  const std::size_t N = 10000;
  const double bound = 1.63 * std::sqrt(2.0 / N);
  double worst = 0.0;
  for (const auto& g : kGens) {
    const auto spec = gen(g);
    for (int count : {2, 5}) {
      RandomStream r1(derive_seed(31, g.name + "inv" + std::to_string(count)));
      RandomStream r2(derive_seed(31, g.name + "min" + std::to_string(count)));
      std::vector<double> a, b;
      for (std::size_t i = 0; i < N; ++i) {
        a.push_back(models::sample_w(spec, count, r1, models::WRoute::Inversion).value);
        b.push_back(models::sample_w(spec, count, r2, models::WRoute::CopulaMin).value);
      }
      const double ks = orderings::ks_statistic(a, b);
      worst = std::max(worst, ks);
      o.expect(ks < bound, g.name + " count=" + std::to_string(count) + fmt(" KS %.4g", ks));
    }
  }
  o.info(fmt("worst two-sample KS %.4g, bound %.4g", worst, bound));
  return o;
}

// 4. Classical reductions.
Outcome classical() {
  Outcome o;
  const auto e1 = dist("exponential", {1.0});
  const auto ind = copulagen::builtin_generator("independence", {});
  const auto means = oracle::exp_os_means(3);
  {
    const models::DsosModel m({e1, e1, e1}, ind);
    const auto s = models::sample_dsos_batch(m, 100000, 401);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto col = s.column(c);
      const double z = std::abs(oracle::mean(col) - means[c]) / se_of_mean(col);
      o.expect(z <= 3.0, fmt("DSOS mean of x%g: z=%.3g", c + 1.0, z));
    }
  }
  {
    const models::DgosModel m(e1, models::dgos_params_from_gamma({3, 2, 1}), ind);
    const auto s = models::sample_dgos_batch(m, 100000, 402);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto col = s.column(c);
      const double z = std::abs(oracle::mean(col) - means[c]) / se_of_mean(col);
      o.expect(z <= 3.0, fmt("DGOS gamma=(3,2,1) mean of x%g: z=%.3g", c + 1.0, z));
    }
  }
  for (const auto& p : {models::dgos_params(3, 1.0, {0.0, -0.5}), models::dgos_params(3, 2.0, {-1.0, -1.0}),
                        models::dgos_params(4, 1.5, {0.5, 0.0, -0.5})}) {
    const models::DgosModel m(e1, p, ind);
    const double g1 = p.gamma[0];
    const auto x1 = models::sample_dgos_batch(m, 10000, 403 + static_cast<std::uint64_t>(g1 * 10)).column(0);
    const double ks = orderings::ks_statistic(x1, [&](double t) { return 1.0 - std::exp(-g1 * t); });
    o.expect(ks < orderings::dkw_bound(10000), fmt("DGOS x1 vs exp(-%g t): KS %.4g", g1, ks));
  }
  return o;
}

// 5. Joint density integrates to one.
Outcome normalization() {
  Outcome o;
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  struct Case {
    oracle::Gen g;
    distributions::DistributionSpec base;
    std::vector<double> m;
  };
  const std::vector<Case> cases = {{{"clayton", {1.0}}, dist("exponential", {1.0}), {0.0}},
                                   {{"gumbel", {1.5}}, dist("weibull", {0.5, 1.0}), {-0.5}},
                                   {{"ex62", {2.0}}, dist("lomax", {3.0, 1.0}), {1.0}}};
  for (const auto& c : cases) {
    const models::DgosModel m(c.base, models::dgos_params(2, 1.0, c.m), gen(c.g));
    auto inner = [&](double x1) {
      auto f = [&](double x2) { return models::dgos_joint_density(m, {x1, x2}); };
      return gauss_kronrod<double, 31>::integrate(f, x1, inf, 12, 1e-10);
    };
    const double total = gauss_kronrod<double, 31>::integrate(inner, 0.0, inf, 12, 1e-9);
    o.expect(std::abs(total - 1.0) <= 1e-3, c.g.name + " " + c.base.describe() + fmt(": integral %.8f", total));
    o.info(c.g.name + " " + c.base.describe() + fmt(": integral %.8f", total));
  }
  return o;
}

// 6. Theorem suite under defaults.
Outcome theorem_suite() {
  Outcome o;
  config::ExperimentConfig cfg;
  cfg.seed = 42;
  cfg.N = 100000;
  harness::RunOptions opt;
  opt.timing = true;
  opt.threads = 1;
  const auto entries = harness::run_all(cfg, opt);
  o.expect(entries.size() == 37, "catalog size");
  for (const auto& e : entries) {
    if (!e.report) {
      o.expect(false, e.scenario + ": " + e.error);
      continue;
    }
    const auto& r = *e.report;
    const double t = r.wall_time_s.value_or(0.0);
    o.expect(r.verdict == Status::Holds, e.scenario + " verdict " + std::string(to_string(r.verdict)));
    o.expect(t <= 60.0, e.scenario + fmt(" wall time %.2fs", t));
    o.info(e.scenario + " " + std::string(to_string(r.verdict)) +
           fmt(" max_violation=%.3g tol=%.3g time=%.2fs", r.conclusion.max_violation, r.conclusion.tolerance, t));
  }
  return o;
}

// 7. Negative controls.
Outcome negative_controls() {
  Outcome o;
  const auto start = Clock::now();
  for (const char* id : {"T4.4a", "T5.3a", "T5.9a"}) {
    config::ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.reverse = true;
    const auto r = harness::verify_scenario(harness::lookup_scenario(id), cfg);
    o.expect(r.verdict == Status::Violated, std::string(id) + " reversed: " + std::string(to_string(r.verdict)));
    o.info(std::string(id) + " reversed " + std::string(to_string(r.verdict)) +
           fmt(" max_violation=%.4g tol=%.4g", r.conclusion.max_violation, r.conclusion.tolerance));
  }
  {
    config::ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.generator = config::GeneratorConfig{"clayton", {2.0}};
    const auto r = harness::verify_scenario(harness::lookup_scenario("T4.1b"), cfg);
    bool named = false;
    for (const auto& h : r.hypotheses) named = named || (h.id == "R_RATIO_POS_INC" && h.status == Status::Violated);
    o.expect(r.verdict == Status::Inconclusive && named, "T4.1b clayton 2: " + std::string(to_string(r.verdict)));
    o.info("T4.1b clayton 2 " + std::string(to_string(r.verdict)) + (named ? ", failing R_RATIO_POS_INC" : ""));
  }
  const double t = std::chrono::duration<double>(Clock::now() - start).count();
  o.expect(t < 60.0, fmt("runtime %.2fs", t));
  return o;
}

// 8. Conditional kernels.
Outcome kernels() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<models::DsosModel> ms = {
      models::DsosModel({dist("exponential", {1.0}), dist("exponential", {2.0}), dist("exponential", {3.0}),
                         dist("exponential", {4.0})},
                        copulagen::builtin_generator("ex63", {0.5})),
      models::DsosModel({dist("weibull", {0.5, 1.0}), dist("weibull", {0.5, 1.0}), dist("weibull", {2.0, 1.0}),
                         dist("weibull", {2.0, 1.0})},
                        copulagen::builtin_generator("gumbel", {1.5})),
      models::DsosModel({dist("gamma", {2.0, 1.0}), dist("lomax", {3.0, 1.0}), dist("lomax", {3.0, 1.0}),
                         dist("lomax", {3.0, 1.0})},
                        copulagen::builtin_generator("clayton", {2.0}))};
  double worst_rt = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto& m = ms[static_cast<std::size_t>(k) % ms.size()];
    const int r = 2 + static_cast<int>(U(rng) * 3.0);
    const double x = m.dist(r).quantile(0.05 + 0.8 * U(rng));
    const double p = 0.01 + 0.98 * U(rng);
    const double t = models::dsos_conditional_quantile(m, r, x, p);
    worst_rt = std::max(worst_rt, std::abs(models::dsos_transition_survival(m, r, x, t) - (1.0 - p)));
  }
  o.expect(worst_rt <= 1e-8, fmt("round trip max error %.3g", worst_rt));
  double worst_int = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto& m = ms[static_cast<std::size_t>(k) % ms.size()];
    const int r = 2 + static_cast<int>(U(rng) * 3.0);
    const double x = m.dist(r).quantile(0.05 + 0.6 * U(rng));
    const double t = models::dsos_conditional_quantile(m, r, x, 0.05 + 0.9 * U(rng));
    // Composite Simpson, 1000 panels.
    const int panels = 1000;
    const double h = (t - x) / panels;
    double s = models::dsos_conditional_hazard(m, r, x, x) + models::dsos_conditional_hazard(m, r, x, t);
    for (int j = 1; j < panels; ++j) s += (j % 2 ? 4.0 : 2.0) * models::dsos_conditional_hazard(m, r, x, x + j * h);
    const double integral = s * h / 3.0;
    worst_int = std::max(worst_int, std::abs(std::exp(-integral) - models::dsos_transition_survival(m, r, x, t)));
  }
  o.expect(worst_int <= 1e-5, fmt("exp(-int hazard) max error %.3g", worst_int));
  o.info(fmt("round trip %.3g, hazard integral %.3g", worst_rt, worst_int));
  return o;
}

// 9. Repeated CLI runs give identical bytes.
Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "osim_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 42, "N": 100000, "batch": [{"scenario": "T4.4a"}, {"scenario": "T5.9b"}, {"scenario": "T4.2b"}]})";
  }
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string(OSIM_CLI_PATH) + " verify --config " + (dir / "cfg.json").string() +
                            " --out " + (dir / run).string() + " > /dev/null";
    const int rc = std::system(cmd.c_str());
    o.expect(rc == 0, std::string("osim verify run ") + run + " exit status " + std::to_string(rc));
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto other = dir / "b" / entry.path().filename();
    o.expect(fs::exists(other) && slurp(entry.path()) == slurp(other), entry.path().filename().string() + " differs");
    ++files;
  }
  o.expect(files >= 4, "expected three reports plus index");
  o.info(std::to_string(files) + " files compared");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double budget_s;  // total runtime limit; the theorem suite checks per scenario itself
  };
  const double none = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria = {
      {"generator golden tests", generator_golden, 1.0},
      {"sampler fidelity", sampler_fidelity, 30.0},
      {"route equivalence", route_equivalence, 30.0},
      {"classical reductions", classical, 60.0},
      {"joint density normalization", normalization, 30.0},
      {"theorem suite", theorem_suite, none},
      {"negative controls", negative_controls, 60.0},
      {"conditional-kernel self-consistency", kernels, 10.0},
      {"determinism", determinism, none},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double t = std::chrono::duration<double>(Clock::now() - start).count();
    o.expect(t <= criteria[i].budget_s, fmt("runtime %.2fs over budget %.0fs", t, criteria[i].budget_s));
    std::printf("%s criterion %zu: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(), t);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
