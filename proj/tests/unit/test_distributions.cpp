#include <gtest/gtest.h>

#include <cmath>

#include "osim/distributions.hpp"
#include "osim/error.hpp"
#include "support/oracles.hpp"

using namespace osim;
using distributions::AgingClass;
using distributions::builtin_distribution;

namespace {

std::vector<distributions::DistributionSpec> builtins() {
  return {builtin_distribution("exponential", {1.5}), builtin_distribution("weibull", {0.5, 1.0}),
          builtin_distribution("weibull", {2.0, 3.0}), builtin_distribution("lomax", {3.0, 2.0}),
          builtin_distribution("gamma", {0.5, 1.0}), builtin_distribution("gamma", {3.0, 2.0})};
}

}  // namespace

TEST(Builtin, ClosedFormValues) {
  EXPECT_NEAR(builtin_distribution("exponential", {1.0}).survival(1.0), oracle::kInvE, 1e-15);
  const auto w = builtin_distribution("weibull", {0.5, 1.0});
  EXPECT_NEAR(w.cum_hazard(2.25), 1.5, 1e-14);
  EXPECT_NEAR(w.inv_cum_hazard(1.7), 1.7 * 1.7, 1e-13);
  // Lomax(a, s): survival (1 + x/s)^-a.
  EXPECT_NEAR(builtin_distribution("lomax", {3.0, 2.0}).survival(1.0), std::pow(1.5, -3.0), 1e-15);
  // Gamma(1, rate) is exponential.
  EXPECT_NEAR(builtin_distribution("gamma", {1.0, 2.0}).survival(0.7), std::exp(-1.4), 1e-12);
}

TEST(Builtin, Errors) {
  EXPECT_THROW(builtin_distribution("exponential", {-1.0}), Error);
  EXPECT_THROW(builtin_distribution("cauchy", {1.0}), Error);
  try {
    builtin_distribution("exponential", {-1.0});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParamOutOfDomain);
  }
}

TEST(Builtin, FieldIdentities) {
  for (const auto& d : builtins()) {
    for (double p : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      const double x = d.quantile(p);
      EXPECT_NEAR(d.cdf(x), p, 1e-8) << d.describe();
      EXPECT_NEAR(d.survival(x) + d.cdf(x), 1.0, 1e-12) << d.describe();
      EXPECT_NEAR(-std::log(d.survival(x)), d.cum_hazard(x), 1e-10 * std::max(1.0, d.cum_hazard(x)))
          << d.describe();
      EXPECT_NEAR(d.hazard(x), d.density(x) / d.survival(x), 1e-8 * d.hazard(x)) << d.describe();
    }
    for (double y : {1e-6, 0.1, 1.0, 5.0, 30.0}) {
      EXPECT_NEAR(d.cum_hazard(d.inv_cum_hazard(y)), y, 1e-8 * std::max(1.0, y)) << d.describe();
    }
    EXPECT_DOUBLE_EQ(d.inv_cum_hazard(0.0), 0.0);
    EXPECT_TRUE(std::isinf(d.right_endpoint()));
  }
}

TEST(Phr, MatchesExponential) {
  const auto e3 = distributions::make_phr(builtin_distribution("exponential", {1.0}), 3.0);
  EXPECT_NEAR(e3.survival(1.0), oracle::kEm3, 1e-15);
  const auto w4 = distributions::make_phr(builtin_distribution("weibull", {0.5, 1.0}), 4.0);
  EXPECT_NEAR(w4.cum_hazard(0.09), 4.0 * 0.3, 1e-14);
  EXPECT_NEAR(w4.inv_cum_hazard(2.0), 0.25, 1e-14);
}

TEST(Phr, HazardScales) {
  for (const auto& d : builtins()) {
    const auto p = distributions::make_phr(d, 2.5);
    const auto p1 = distributions::make_phr(d, 1.0);
    for (double q : {0.1, 0.5, 0.9}) {
      const double x = d.quantile(q);
      EXPECT_NEAR(p.hazard(x), 2.5 * d.hazard(x), 1e-10 * d.hazard(x) + 1e-14);
      EXPECT_NEAR(p1.survival(x), d.survival(x), 1e-15);
    }
  }
}

TEST(Aging, Classes) {
  const auto e = builtin_distribution("exponential", {1.0});
  EXPECT_EQ(distributions::check_aging_class(e, AgingClass::DFR).status, Status::Holds);
  EXPECT_EQ(distributions::check_aging_class(e, AgingClass::IFR).status, Status::Holds);
  const auto w2 = builtin_distribution("weibull", {2.0, 1.0});
  EXPECT_EQ(distributions::check_aging_class(w2, AgingClass::DFR).status, Status::Violated);
  EXPECT_EQ(distributions::check_aging_class(w2, AgingClass::IFR).status, Status::Holds);
  EXPECT_EQ(distributions::check_aging_class(builtin_distribution("gamma", {0.5, 1.0}), AgingClass::DFR).status,
            Status::Holds);
  EXPECT_EQ(distributions::check_aging_class(builtin_distribution("weibull", {0.5, 1.0}), AgingClass::DFR).status,
            Status::Holds);
}

TEST(Aging, GridOutsideSupport) {
  std::vector<double> grid;
  for (int i = 0; i < 120; ++i) grid.push_back(-1.0 + 0.01 * i);
  EXPECT_THROW(distributions::check_aging_class(builtin_distribution("exponential", {1.0}), AgingClass::DFR, grid),
               Error);
}

TEST(WLaw, IndependenceIsExponential) {
  const auto w = distributions::make_w_law(copulagen::builtin_generator("independence", {}), 3.0);
  EXPECT_NEAR(w.quantile(0.5), oracle::kLn2Over3, 1e-12);
  EXPECT_NEAR(w.hazard(0.4), 3.0, 1e-12);
}

TEST(SumLaw, ErlangOracle) {
  // Exp(1) + Exp(1) is Gamma(2, 1): survival (1 + t) e^-t.
  const auto e = builtin_distribution("exponential", {1.0});
  const auto s = distributions::make_sum_law({e, e});
  for (double t : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    EXPECT_NEAR(s.survival(t), (1.0 + t) * std::exp(-t), 1e-7) << t;
    EXPECT_NEAR(s.density(t), t * std::exp(-t), 1e-6) << t;
  }
  EXPECT_LT(s.tolerance_hint(), 1e-4);
}

TEST(SumLaw, HypoexponentialOracle) {
  // Exp(3) + Exp(2) + Exp(1): the spacings of three iid Exp(1) order statistics,
  // so the sum has the law of their maximum, (1 - e^-t)^3.
  const auto s = distributions::make_partial_sum_laws({builtin_distribution("exponential", {3.0}),
                                                       builtin_distribution("exponential", {2.0}),
                                                       builtin_distribution("exponential", {1.0})});
  ASSERT_EQ(s.size(), 3u);
  for (double t : {0.2, 1.0, 3.0}) {
    EXPECT_NEAR(s[2].cdf(t), std::pow(1.0 - std::exp(-t), 3.0), 1e-7);
    EXPECT_NEAR(s[1].cdf(t), 1.0 - 3.0 * std::exp(-2.0 * t) + 2.0 * std::exp(-3.0 * t), 1e-7);
  }
}
