#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "osim/distributions.hpp"
#include "osim/models.hpp"
#include "osim/sample_matrix.hpp"
#include "osim/verdict.hpp"

namespace osim::orderings {

using distributions::DistributionSpec;

enum class Relation { st, hr, rh, lr, disp, icx, mrl, c, st_multi, dyn_hr, disp_multi };

std::string_view to_string(Relation r) noexcept;
Relation parse_relation(std::string_view text);

// ---- univariate ----------------------------------------------------------

struct AnalyticOptions {
  // Evaluation points in the common support. Empty: 200 points at quantile
  // levels of both laws in [0.01, 0.99]. disp uses u_grid instead.
  std::vector<double> grid;
  std::vector<double> u_grid;  // empty: 0.02, 0.04, ..., 0.98
};

inline constexpr double kAnalyticTolerance = 1e-9;
inline constexpr std::size_t kMinEmpiricalDraws = 1000;

// Analytic check of X <=_rel Y. Ratio relations are tested on the log scale,
// so violations are relative. Numeric laws widen the tolerance by their
// tolerance_hint().
OrderVerdict check_order_uni(const DistributionSpec& X, const DistributionSpec& Y, Relation rel,
                             const AnalyticOptions& options = {});

struct EmpiricalOptions {
  double dkw_alpha = 0.01;     // st: per-side DKW band at this level
  double z_threshold = 3.0;    // SE-based relations
  std::size_t ratio_points = 20;
  std::size_t lr_points = 10;
  std::size_t stop_loss_points = 50;
};

// Empirical check of X <=_rel Y from independent samples. st reports the
// largest survival excess against the summed DKW bands; the other relations
// report the largest z-score against z_threshold.
OrderVerdict check_order_uni(const std::vector<double>& X, const std::vector<double>& Y, Relation rel,
                             const EmpiricalOptions& options = {});

// ∫_t^∞ F̄(x) dx.
double integrated_survival(const DistributionSpec& dist, double t);

// ---- multivariate ---------------------------------------------------------

struct BatteryOptions {
  std::uint64_t seed = 0x5eed;
  std::size_t orthants = 50;
  std::size_t weighted_sums = 20;
  double z_threshold = 3.0;
};

// Necessary-condition battery for the usual multivariate stochastic order.
OrderVerdict check_st_multi(const SampleMatrix& X, const SampleMatrix& Y, const BatteryOptions& options = {});

// Coordinates offset+1 .. offset+length of a DSOS vector.
struct DsosView {
  models::DsosModel model;
  int offset = 0;
  int length = 0;
};

DsosView full_view(const models::DsosModel& model);

struct DynHrOptions {
  // History times. Empty: F_1 quantiles at 0.1, ..., 0.9 of both models.
  std::vector<double> times;
  double tolerance = 1e-9;
};

// Hazard of the next failure of the view, given `failures` observed view
// coordinates with the last at `last` (ignored when failures = 0), at u.
double view_next_hazard(const DsosView& view, int failures, double last, double u);

// Dynamic multivariate hazard rate order X <= Y over ordered-support
// histories: eta(u | s) >= lambda(u | t) for s <= t <= u.
OrderVerdict check_dyn_hr_dsos(const DsosView& X, const DsosView& Y, const DynHrOptions& options = {});

// u -> (x_1(u), ..., x_d(u)) built from sequential conditional quantiles.
struct QuantileMap {
  int dim = 0;
  std::function<void(const double* u, double* x)> apply;
  double tolerance_hint = 0.0;
  std::string label;
};

// First `length` coordinates of a DSOS vector (length 0: all n).
QuantileMap dsos_quantile_map(const models::DsosModel& model, int length = 0);

// Coordinates (X(p_1), ..., X(p_i)) of a DGOS vector, p 1-based increasing.
// Gaps between consecutive indices use numeric sum laws of the B terms.
QuantileMap dgos_quantile_map(const models::DgosModel& model, const std::vector<int>& indices,
                              const distributions::SumLawOptions& sum_options = {});

// (0, inner): a degenerate coordinate at 0 in front.
QuantileMap zero_prepend(const QuantileMap& inner);

struct DispMultiOptions {
  std::vector<double> axis;  // empty: j/10, j = 1..9
  double tolerance = 1e-8;
};

// y_i(u) - x_i(u) nondecreasing in each of u_1..u_i on the tensor grid.
OrderVerdict check_disp_multi(const QuantileMap& X, const QuantileMap& Y, const DispMultiOptions& options = {});

// ---- majorization ---------------------------------------------------------

enum class Majorization { w_super, p_larger, rm };

std::string_view to_string(Majorization m) noexcept;
Majorization parse_majorization(std::string_view text);

struct MajorizationResult {
  bool holds = true;
  int first_violation = 0;  // 1-based j, 0 when none
  std::vector<double> lhs;  // partial statistic of x
  std::vector<double> rhs;  // partial statistic of y
};

// Tests y ⪯ x: w_super: sum_{i<=j} x_(i) <= sum y_(i); p_larger: products;
// rm: sum 1/x_(i) >= sum 1/y_(i); sorted ascending, j = 1..n.
MajorizationResult check_majorization(const std::vector<double>& x, const std::vector<double>& y,
                                      Majorization relation);

// ---- empirical helpers ----------------------------------------------------

enum class StatKind { ecdf, quantile, stop_loss, integrated_survival };

double empirical_stats(const std::vector<double>& sample, StatKind kind, double at);

// sqrt(ln(2/alpha) / (2N)).
double dkw_bound(std::size_t n, double alpha = 0.01);
double ks_threshold_one_sample(std::size_t n);  // 1.63 / sqrt(N)
double ks_threshold_two_sample(std::size_t n);  // 1.63 * sqrt(2/N)

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace osim::orderings
