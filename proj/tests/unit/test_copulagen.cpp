#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "osim/copulagen.hpp"
#include "osim/error.hpp"
#include "osim/orderings.hpp"
#include "support/oracles.hpp"

using namespace osim;
using copulagen::Condition;

namespace {

copulagen::GeneratorSpec gen(const std::string& name, std::vector<double> params = {}) {
  return copulagen::builtin_generator(name, params);
}

const std::vector<oracle::Gen> kBuiltins = {
    {"independence", {}}, {"clayton", {2.0}}, {"gumbel", {1.5}},
    {"ex61", {0.5}},      {"ex62", {2.0}},    {"ex63", {1.5}},
};

}  // namespace

TEST(Builtin, PhiMatchesClosedForms) {
  for (const auto& g : kBuiltins) {
    const auto spec = gen(g.name, g.params);
    for (double u : {0.0, 0.01, 0.3, 1.0, 2.5, 7.0}) {
      EXPECT_NEAR(spec.phi(u), oracle::phi(g, u), 1e-12) << g.name << " u=" << u;
    }
    for (double s : {0.999, 0.7, 0.3, 0.01}) {
      EXPECT_NEAR(spec.psi(s), oracle::psi(g, s), 1e-9 * std::max(1.0, oracle::psi(g, s))) << g.name;
    }
  }
}

TEST(Builtin, IndependencePhiAtOne) { EXPECT_NEAR(gen("independence").phi(1.0), oracle::kInvE, 1e-15); }

TEST(Builtin, Ex61ThetaOne) {
  const auto g = gen("ex61", {1.0});
  EXPECT_DOUBLE_EQ(g.phi(0.0), 1.0);
  EXPECT_NEAR(g.phi(1.3), std::exp(1.0 - std::exp(1.3)), 1e-15);
}

TEST(Builtin, DomainErrors) {
  try {
    gen("ex62", {0.5});
    FAIL() << "expected ParamOutOfDomain";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParamOutOfDomain);
    EXPECT_NE(std::string(e.what()).find("theta2"), std::string::npos);
  }
  EXPECT_THROW(gen("frank", {1.0}), Error);
  EXPECT_THROW(gen("clayton", {-1.0}), Error);
  EXPECT_THROW(gen("gumbel", {0.5}), Error);
  EXPECT_THROW(gen("ex61", {1.5}), Error);
}

TEST(Builtin, InverseRoundTrip) {
  for (const auto& g : kBuiltins) {
    const auto spec = gen(g.name, g.params);
    for (double u : copulagen::default_grid()) {
      if (u > 5.0) break;
      EXPECT_NEAR(spec.psi(spec.phi(u)), u, 1e-8 * std::max(1.0, u)) << g.name << " u=" << u;
    }
  }
}

TEST(Builtin, DerivativesAgreeWithFiniteDifferences) {
  for (const auto& g : kBuiltins) {
    const auto spec = gen(g.name, g.params);
    for (double u : {0.05, 0.4, 1.0, 3.0}) {
      const double h = 1e-6 * std::max(1.0, u);
      const double d1 = (oracle::phi(g, u + h) - oracle::phi(g, u - h)) / (2 * h);
      EXPECT_NEAR(spec.phi_d1(u), d1, 1e-5 * std::abs(d1) + 1e-9) << g.name;
      const double h2 = 1e-4 * std::max(1.0, u);
      const double d2 = (oracle::phi(g, u + h2) - 2 * oracle::phi(g, u) + oracle::phi(g, u - h2)) / (h2 * h2);
      EXPECT_NEAR(spec.phi_d2(u), d2, 1e-4 * std::abs(d2) + 1e-7) << g.name;
    }
  }
}

TEST(Diagnostics, Independence) {
  const auto d = copulagen::diagnostics(gen("independence"), 1.0);
  EXPECT_NEAR(d.H, oracle::kIndepH1, 1e-12);
  EXPECT_NEAR(d.R, -1.0, 1e-14);
  EXPECT_NEAR(d.G, -1.0, 1e-14);
}

TEST(Diagnostics, Ex61AndClayton) {
  EXPECT_NEAR(copulagen::diagnostics(gen("ex61", {1.0}), 1.0).R, -std::exp(1.0), 1e-12);
  EXPECT_NEAR(copulagen::diagnostics(gen("clayton", {1.0}), 1.0).R, -0.5, 1e-14);
  EXPECT_NEAR(copulagen::diagnostics(gen("clayton", {2.0}), 0.7).R, oracle::clayton_r(2.0, 0.7), 1e-14);
}

TEST(Diagnostics, FunctionalsNegativeOnGrid) {
  for (const auto& g : kBuiltins) {
    const auto spec = gen(g.name, g.params);
    for (double u : copulagen::default_grid()) {
      const auto d = copulagen::diagnostics(spec, u);
      // H carries a factor phi(u), which underflows for ex61 at large u.
      if (spec.log_phi(u) > -700.0) {
        EXPECT_LT(d.H, 0.0) << g.name << " u=" << u;
      } else {
        EXPECT_LE(d.H, 0.0) << g.name << " u=" << u;
      }
      EXPECT_LT(d.R, 0.0) << g.name << " u=" << u;
      EXPECT_LT(d.G, 0.0) << g.name << " u=" << u;
    }
  }
}

TEST(Diagnostics, DegenerateAtZero) { EXPECT_THROW(copulagen::diagnostics(gen("clayton", {1.0}), 0.0), Error); }

TEST(Conditions, ExamplesFromFamilies) {
  EXPECT_EQ(copulagen::check_generator_condition(gen("ex61", {0.5}), Condition::R_RATIO_POS_INC, {}).status,
            Status::Holds);
  EXPECT_EQ(copulagen::check_generator_condition(gen("ex62", {2.0}), Condition::H_RATIO_NEG_DEC, {}).status,
            Status::Holds);
  EXPECT_EQ(copulagen::check_generator_condition(gen("ex63", {0.5}), Condition::GR_DIFF_POS_INC, 3).status,
            Status::Holds);
  const auto ind = copulagen::check_generator_condition(gen("independence"), Condition::GR_DIFF_POS_INC, 3);
  EXPECT_EQ(ind.status, Status::Holds);
  EXPECT_NEAR(copulagen::condition_functional(gen("independence"), Condition::GR_DIFF_POS_INC, 3, 0.8), 2.0, 1e-12);
}

TEST(Conditions, ClaytonFailsRRatio) {
  const auto v = copulagen::check_generator_condition(gen("clayton", {2.0}), Condition::R_RATIO_POS_INC, {});
  EXPECT_EQ(v.status, Status::Violated);
  EXPECT_GT(v.worst_violation, 0.0);
  // uR'/R = 1/(1+u) for Clayton at any theta.
  EXPECT_NEAR(copulagen::condition_functional(gen("clayton", {2.0}), Condition::R_RATIO_INC, {}, 1.5), 1.0 / 2.5,
              1e-12);
}

TEST(Conditions, GumbelDefaults) {
  const auto g = gen("gumbel", {1.5});
  for (auto c : {Condition::R_RATIO_POS_INC, Condition::R_DEC}) {
    EXPECT_EQ(copulagen::check_generator_condition(g, c, {}).status, Status::Holds) << copulagen::to_string(c);
  }
  EXPECT_EQ(copulagen::check_generator_condition(g, Condition::GR_DIFF_POS_INC, 4).status, Status::Holds);
  EXPECT_EQ(copulagen::check_generator_condition(gen("ex63", {1.5}), Condition::GR_DIFF_POS_INC, 4).status,
            Status::Violated);
}

TEST(Conditions, GridPreconditions) {
  const auto g = gen("independence");
  EXPECT_THROW(copulagen::check_generator_condition(g, Condition::R_DEC, {}, {0.1, 0.2, 0.3}), Error);
  EXPECT_THROW(copulagen::check_generator_condition(g, Condition::GR_DIFF_POS_INC, {}), Error);
  EXPECT_EQ(copulagen::parse_condition("H_RATIO_DEC"), Condition::H_RATIO_DEC);
  EXPECT_THROW(copulagen::parse_condition("NOPE"), Error);
}

TEST(Validate, Cases) {
  EXPECT_TRUE(copulagen::validate_generator(gen("independence"), 5).empty());
  EXPECT_TRUE(copulagen::validate_generator(gen("clayton", {1.0}), 3).empty());
  const auto bad = copulagen::GeneratorSpec::custom("gauss", [](double u) { return std::exp(-u * u); });
  const auto v = copulagen::validate_generator(bad, 2);
  ASSERT_FALSE(v.empty());
  bool convex = false;
  for (const auto& c : v) {
    if (c.clause == "convex") {
      convex = true;
      EXPECT_LT(c.point, 1.0 / std::sqrt(2.0));
    }
  }
  EXPECT_TRUE(convex);
}

TEST(Sampling, IndependenceUniformAndUncorrelated) {
  RandomStream rng(7);
  const std::size_t N = 100000;
  std::vector<double> a, b;
  double sxy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto u = copulagen::sample_copula_uniforms(gen("independence"), 2, rng);
    a.push_back(u[0]);
    b.push_back(u[1]);
    sxy += (u[0] - 0.5) * (u[1] - 0.5);
  }
  EXPECT_LT(std::abs(sxy / N * 12.0), 3.0 / std::sqrt(static_cast<double>(N)));
  auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_LT(orderings::ks_statistic(a, unif), orderings::ks_threshold_one_sample(N));
  EXPECT_LT(orderings::ks_statistic(b, unif), orderings::ks_threshold_one_sample(N));
}

TEST(Sampling, ClaytonKendallTau) {
  RandomStream rng(11);
  const std::size_t N = 3000;  // O(N^2) concordance count
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < N; ++i) {
    const auto u = copulagen::sample_copula_uniforms(gen("clayton", {2.0}), 2, rng);
    pts.emplace_back(u[0], u[1]);
  }
  double conc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      conc += ((pts[i].first - pts[j].first) * (pts[i].second - pts[j].second) > 0) ? 1.0 : -1.0;
    }
  }
  const double tau = conc / (N * (N - 1) / 2.0);
  // SE of tau-hat is about 0.008 here; 3 SE.
  EXPECT_NEAR(tau, oracle::clayton_tau(2.0), 0.025);
}

TEST(Sampling, RoutesAgreeOnMinimum) {
  for (const auto& g : std::vector<oracle::Gen>{{"clayton", {2.0}}, {"gumbel", {1.5}}}) {
    const auto spec = gen(g.name, g.params);
    RandomStream r1(1), r2(2);
    std::vector<double> a, b;
    for (int i = 0; i < 10000; ++i) {
      auto u = copulagen::sample_copula_uniforms(spec, 3, r1, copulagen::CopulaRoute::Frailty);
      auto v = copulagen::sample_copula_uniforms(spec, 3, r2, copulagen::CopulaRoute::ConditionalInversion);
      a.push_back(*std::min_element(u.begin(), u.end()));
      b.push_back(*std::min_element(v.begin(), v.end()));
    }
    EXPECT_LT(orderings::ks_statistic(a, b), orderings::ks_threshold_two_sample(10000)) << g.name;
  }
}

TEST(Sampling, DimOneIsUniform) {
  RandomStream rng(3);
  std::vector<double> a;
  for (int i = 0; i < 100000; ++i) a.push_back(copulagen::sample_copula_uniforms(gen("ex62", {2.0}), 1, rng)[0]);
  EXPECT_LT(orderings::ks_statistic(a, [](double x) { return x; }), orderings::ks_threshold_one_sample(100000));
}
