#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "osim/error.hpp"
#include "osim/models.hpp"
#include "osim/orderings.hpp"

using namespace osim;
using namespace osim::orderings;
using distributions::builtin_distribution;

namespace {

DistributionSpec expo(double rate) { return builtin_distribution("exponential", {rate}); }
models::GeneratorSpec gen(const std::string& name, std::vector<double> p = {}) {
  return copulagen::builtin_generator(name, p);
}

std::vector<double> draws(const DistributionSpec& d, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(d.quantile(rng.uniform()));
  return out;
}

const std::vector<Relation> kUni = {Relation::st, Relation::hr, Relation::rh,  Relation::lr,
                                    Relation::disp, Relation::icx, Relation::mrl, Relation::c};

}  // namespace

TEST(Analytic, ExponentialPairHolds) {
  for (auto rel : kUni) {
    EXPECT_EQ(check_order_uni(expo(1.0), expo(0.5), rel).status, Status::Holds) << to_string(rel);
  }
}

TEST(Analytic, ReversedPairViolates) {
  for (auto rel : kUni) {
    const auto v = check_order_uni(expo(0.5), expo(1.0), rel);
    // Exponentials are ordered both ways in the convex-transform order.
    if (rel == Relation::c) {
      EXPECT_EQ(v.status, Status::Holds);
    } else {
      EXPECT_EQ(v.status, Status::Violated) << to_string(rel);
      EXPECT_GT(v.max_violation, v.tolerance);
    }
  }
}

TEST(Analytic, DispScaleEquivariance) {
  for (double c : {1.5, 3.0}) {
    const auto v = check_order_uni(expo(1.0), expo(1.0 / c), Relation::disp);
    EXPECT_EQ(v.status, Status::Holds);
  }
}

TEST(Analytic, ImplicationsOnBattery) {
  const std::vector<DistributionSpec> laws = {expo(2.0), expo(1.0), builtin_distribution("weibull", {0.5, 1.0}),
                                              builtin_distribution("weibull", {2.0, 1.0}),
                                              builtin_distribution("weibull", {1.0, 2.0}), builtin_distribution("gamma", {2.0, 1.0})};
  for (const auto& x : laws) {
    for (const auto& y : laws) {
      const bool lr = check_order_uni(x, y, Relation::lr).status == Status::Holds;
      const bool hr = check_order_uni(x, y, Relation::hr).status == Status::Holds;
      if (lr) EXPECT_TRUE(hr) << x.describe() << " vs " << y.describe();
      if (hr) {
        EXPECT_EQ(check_order_uni(x, y, Relation::st).status, Status::Holds);
        EXPECT_EQ(check_order_uni(x, y, Relation::mrl).status, Status::Holds);
      }
    }
  }
}

TEST(Analytic, CommonSupportRequirement) {
  AnalyticOptions o;
  o.grid = {1.0, 2.0, 3.0};
  EXPECT_THROW(check_order_uni(expo(1.0), expo(0.5), Relation::st, o), Error);
}

TEST(Empirical, ExponentialPair) {
  const auto x = draws(expo(1.0), 100000, 1);
  const auto y = draws(expo(0.5), 100000, 2);
  EXPECT_EQ(check_order_uni(x, y, Relation::st).status, Status::Holds);
  EXPECT_EQ(check_order_uni(x, y, Relation::hr).status, Status::Holds);
  EXPECT_EQ(check_order_uni(y, x, Relation::st).status, Status::Violated);
  EXPECT_EQ(check_order_uni(y, x, Relation::hr).status, Status::Violated);
  EXPECT_EQ(check_order_uni(y, x, Relation::icx).status, Status::Violated);
}

TEST(Empirical, Reflexive) {
  const auto x = draws(expo(1.0), 20000, 3);
  for (auto rel : {Relation::st, Relation::disp, Relation::icx}) {
    const auto v = check_order_uni(x, x, rel);
    EXPECT_EQ(v.status, Status::Holds) << to_string(rel);
    EXPECT_LE(v.max_violation, 0.0) << to_string(rel);
  }
}

TEST(Empirical, TooFewDraws) {
  const auto x = draws(expo(1.0), 500, 4);
  EXPECT_THROW(check_order_uni(x, x, Relation::st), Error);
}

TEST(Battery, Cases) {
  const models::DsosModel big(std::vector<DistributionSpec>(4, expo(1.0)), gen("independence"));
  const models::DsosModel small(std::vector<DistributionSpec>(3, expo(1.0)), gen("independence"));
  const auto xb = models::sample_dsos_batch(big, 100000, 10).select({0, 1, 2});
  const auto ys = models::sample_dsos_batch(small, 100000, 11);
  EXPECT_EQ(check_st_multi(xb, ys).status, Status::Holds);
  EXPECT_EQ(check_st_multi(ys, xb).status, Status::Violated);
  const auto v = check_st_multi(ys, ys);
  EXPECT_EQ(v.status, Status::Holds);
  EXPECT_LE(v.max_violation, 0.0);
  auto shifted = ys;
  for (auto& d : shifted.data) d += 0.1;
  EXPECT_EQ(check_st_multi(ys, shifted).status, Status::Holds);
  EXPECT_NE(v.note.find("necessary"), std::string::npos);
}

TEST(DynHr, SelfAndIndependence) {
  const models::DsosModel m(std::vector<DistributionSpec>(3, expo(1.0)), gen("independence"));
  const auto v = check_dyn_hr_dsos(full_view(m), full_view(m));
  EXPECT_EQ(v.status, Status::Holds);
  EXPECT_NEAR(view_next_hazard(full_view(m), 1, 0.4, 0.9), 2.0, 1e-10);
}

TEST(DynHr, ShiftedChainHolds) {
  // ex61 0.5, F_1 <=hr F_2 <=hr F_3: lower coordinates against the shifted ones.
  const models::DsosModel m({expo(3.0), expo(2.0), expo(1.0)}, gen("ex61", {0.5}));
  const DsosView lower{m, 0, 2};
  const DsosView upper{m, 1, 2};
  EXPECT_EQ(check_dyn_hr_dsos(lower, upper).status, Status::Holds);
}

TEST(DynHr, RateOrdering) {
  const models::DsosModel fast(std::vector<DistributionSpec>(3, expo(1.0)), gen("gumbel", {1.5}));
  const models::DsosModel slow(std::vector<DistributionSpec>(3, expo(0.5)), gen("gumbel", {1.5}));
  EXPECT_EQ(check_dyn_hr_dsos(full_view(fast), full_view(slow)).status, Status::Holds);
  EXPECT_EQ(check_dyn_hr_dsos(full_view(slow), full_view(fast)).status, Status::Violated);
}

TEST(DispMulti, OrderStatistics) {
  const models::DsosModel a(std::vector<DistributionSpec>(2, expo(1.0)), gen("independence"));
  const models::DsosModel b(std::vector<DistributionSpec>(2, expo(0.5)), gen("independence"));
  const auto qa = dsos_quantile_map(a);
  const auto qb = dsos_quantile_map(b);
  EXPECT_EQ(check_disp_multi(qa, qa).status, Status::Holds);
  EXPECT_EQ(check_disp_multi(qa, qb).status, Status::Holds);
  EXPECT_EQ(check_disp_multi(qb, qa).status, Status::Violated);
}

TEST(DispMulti, ZeroPrepend) {
  const models::DsosModel a(std::vector<DistributionSpec>(2, expo(1.0)), gen("independence"));
  const auto z = zero_prepend(dsos_quantile_map(a, 1));
  ASSERT_EQ(z.dim, 2);
  double u[2] = {0.3, 0.5};
  double x[2];
  z.apply(u, x);
  EXPECT_EQ(x[0], 0.0);
  EXPECT_NEAR(x[1], -std::log(0.5) / 2.0, 1e-12);
}

TEST(Majorization, HandExamples) {
  EXPECT_TRUE(check_majorization({0.5, 2, 3.5}, {1, 2, 3}, Majorization::w_super).holds);
  EXPECT_TRUE(check_majorization({0.5, 2}, {1, 1}, Majorization::p_larger).holds);
  // gamma = (3,2,1) <=p gamma' = (2.5,2,1): checked as y = gamma, x = gamma'.
  EXPECT_TRUE(check_majorization({2.5, 2, 1}, {3, 2, 1}, Majorization::p_larger).holds);
  const auto r = check_majorization({3, 2, 1}, {1.5, 1, 0.5}, Majorization::p_larger);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.first_violation, 1);
  EXPECT_THROW(check_majorization({1, 2}, {1}, Majorization::rm), Error);
  EXPECT_THROW(check_majorization({1, -2}, {1, 1}, Majorization::p_larger), Error);
}

TEST(Majorization, ChainOnRandomPairs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.1, 5.0);
  int w_count = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x(3), y(3);
    for (auto& v : x) v = U(rng);
    for (auto& v : y) v = U(rng);
    const bool w = check_majorization(x, y, Majorization::w_super).holds;
    const bool p = check_majorization(x, y, Majorization::p_larger).holds;
    const bool rm = check_majorization(x, y, Majorization::rm).holds;
    // Brute-force partial sums in long double.
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    long double sx = 0, sy = 0;
    bool brute = true;
    for (int j = 0; j < 3; ++j) {
      sx += x[j];
      sy += y[j];
      brute = brute && sx <= sy;
    }
    EXPECT_EQ(w, brute);
    if (w) {
      ++w_count;
      EXPECT_TRUE(p);
    }
    if (p) EXPECT_TRUE(rm);
  }
  EXPECT_GT(w_count, 10);
}

TEST(Stats, EmpiricalHelpers) {
  const std::vector<double> s = {1, 2, 3};
  EXPECT_NEAR(empirical_stats(s, StatKind::ecdf, 2.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(empirical_stats(s, StatKind::quantile, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(empirical_stats(s, StatKind::stop_loss, 2.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(dkw_bound(10000), std::sqrt(std::log(200.0) / 20000.0), 1e-15);
  EXPECT_THROW(empirical_stats({}, StatKind::ecdf, 0.0), Error);
}

TEST(Integrated, SurvivalOfExponential) {
  EXPECT_NEAR(integrated_survival(expo(0.5), 1.0), 2.0 * std::exp(-0.5), 1e-9);
}
