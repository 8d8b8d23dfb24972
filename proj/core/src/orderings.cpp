#include "osim/orderings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "osim/error.hpp"
#include "osim/grid.hpp"

namespace osim::orderings {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// z-score of an excess with standard deviation sd; exact ties give 0.
double zscore(double excess, double var) {
  if (var > 0.0) return excess / std::sqrt(var);
  return excess > 0.0 ? kInf : 0.0;
}

std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s(v);
  std::sort(s.begin(), s.end());
  return s;
}

// Right-continuous inverse of the ECDF of a sorted sample.
double sorted_quantile(const std::vector<double>& s, double p) {
  const double n = static_cast<double>(s.size());
  auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, s.size());
  return s[k - 1];
}

double sorted_ecdf(const std::vector<double>& s, double t) {
  return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) / static_cast<double>(s.size());
}

struct StopLoss {
  double mean;
  double var;  // variance of the mean
};

StopLoss stop_loss(const std::vector<double>& s, double t) {
  double sum = 0.0;
  double sq = 0.0;
  for (double x : s) {
    const double e = std::max(x - t, 0.0);
    sum += e;
    sq += e * e;
  }
  const double n = static_cast<double>(s.size());
  const double m = sum / n;
  const double v = std::max(sq / n - m * m, 0.0) * n / std::max(n - 1.0, 1.0);
  return {m, v / n};
}

// Gaussian kernel density with Silverman's bandwidth.
struct Kde {
  explicit Kde(const std::vector<double>& sorted) : s(sorted) {
    const double n = static_cast<double>(s.size());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double var = 0.0;
    for (double x : s) var += (x - mean) * (x - mean);
    var /= std::max(n - 1.0, 1.0);
    h = 1.06 * std::sqrt(var) * std::pow(n, -0.2);
  }
  double operator()(double t) const {
    if (!(h > 0.0)) return 0.0;
    const double cut = 8.0 * h;
    auto lo = std::lower_bound(s.begin(), s.end(), t - cut);
    auto hi = std::upper_bound(s.begin(), s.end(), t + cut);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double z = (t - *it) / h;
      sum += std::exp(-0.5 * z * z);
    }
    return sum / (static_cast<double>(s.size()) * h * std::sqrt(2.0 * M_PI));
  }
  // Variance of the estimate: f R(K) / (N h).
  double variance(double f) const {
    return f / (2.0 * std::sqrt(M_PI)) / (static_cast<double>(s.size()) * h);
  }
  const std::vector<double>& s;
  double h = 0.0;
};

OrderVerdict make_verdict(Relation rel, std::string method) {
  OrderVerdict v;
  v.relation = std::string(to_string(rel));
  v.method = std::move(method);
  return v;
}

// Largest drop below the running maximum, scaled pointwise.
void monotone_violation(const std::vector<double>& g, const std::vector<double>& scale,
                        const std::vector<double>& at, OrderVerdict& v) {
  double run = -kInf;
  std::size_t run_at = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] > run) {
      run = g[k];
      run_at = k;
    }
    const double drop = (run - g[k]) / scale[k];
    if (k > run_at && drop > v.max_violation) {
      v.max_violation = drop;
      v.worst_point = at[k];
    }
  }
}

double hint_of(const DistributionSpec& d) { return d.tolerance_hint(); }

std::vector<double> default_analytic_grid(const DistributionSpec& X, const DistributionSpec& Y) {
  std::vector<double> g;
  const auto levels = linear_spaced(0.01, 0.99, 100);
  for (double p : levels) {
    g.push_back(X.quantile(p));
    g.push_back(Y.quantile(p));
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
          g.end());
  return g;
}

}  // namespace

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::st: return "st";
    case Relation::hr: return "hr";
    case Relation::rh: return "rh";
    case Relation::lr: return "lr";
    case Relation::disp: return "disp";
    case Relation::icx: return "icx";
    case Relation::mrl: return "mrl";
    case Relation::c: return "c";
    case Relation::st_multi: return "st_multi";
    case Relation::dyn_hr: return "dyn_hr";
    case Relation::disp_multi: return "disp_multi";
  }
  return "st";
}

Relation parse_relation(std::string_view text) {
  for (auto r : {Relation::st, Relation::hr, Relation::rh, Relation::lr, Relation::disp, Relation::icx, Relation::mrl,
                 Relation::c, Relation::st_multi, Relation::dyn_hr, Relation::disp_multi}) {
    if (to_string(r) == text) return r;
  }
  throw Error(ErrorKind::ParamOutOfDomain, "unknown relation '" + std::string(text) + "'");
}

double integrated_survival(const DistributionSpec& dist, double t) {
  const double end = dist.right_endpoint();
  t = std::max(t, 0.0);
  if (t >= end) return 0.0;
  auto f = [&](double x) { return dist.survival(x); };
  double err = 0.0;
  if (std::isfinite(end)) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, t, end, 1e-12, &err);
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, t, kInf, 1e-12, &err);
}

OrderVerdict check_order_uni(const DistributionSpec& X, const DistributionSpec& Y, Relation rel,
                             const AnalyticOptions& options) {
  auto v = make_verdict(rel, "analytic");
  const double hints = hint_of(X) + hint_of(Y);
  v.tolerance = kAnalyticTolerance + 4.0 * hints;

  if (rel == Relation::disp) {
    std::vector<double> u = options.u_grid.empty() ? linear_spaced(0.02, 0.98, 49) : options.u_grid;
    if (u.size() < 5 || !strictly_increasing(u) || u.front() <= 0.0 || u.back() >= 1.0) {
      throw Error(ErrorKind::GridTooCoarse, "disp needs >= 5 increasing levels in (0,1)");
    }
    std::vector<double> d(u.size());
    std::vector<double> scale(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double qx = X.quantile(u[k]);
      const double qy = Y.quantile(u[k]);
      d[k] = qy - qx;
      scale[k] = std::max(1.0, std::abs(qx) + std::abs(qy));
    }
    monotone_violation(d, scale, u, v);
    v.grid = u;
    v.values = d;
    settle(v);
    return v;
  }

  std::vector<double> grid = options.grid.empty() ? default_analytic_grid(X, Y) : options.grid;
  if (grid.size() < 50 || !strictly_increasing(grid)) {
    throw Error(ErrorKind::GridTooCoarse, "analytic order check needs >= 50 strictly increasing grid points");
  }
  const double end = std::min(X.right_endpoint(), Y.right_endpoint());
  if (grid.front() <= 0.0 || grid.back() >= end) {
    throw Error(ErrorKind::GridOutsideSupport, "grid must lie inside the common support (0, " + std::to_string(end) + ")");
  }

  std::vector<double> g(grid.size());
  std::vector<double> ones(grid.size(), 1.0);
  switch (rel) {
    case Relation::st: {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        g[k] = X.survival(grid[k]) - Y.survival(grid[k]);
        if (g[k] > v.max_violation) {
          v.max_violation = g[k];
          v.worst_point = grid[k];
        }
      }
      break;
    }
    case Relation::hr:
      for (std::size_t k = 0; k < grid.size(); ++k) g[k] = X.cum_hazard(grid[k]) - Y.cum_hazard(grid[k]);
      monotone_violation(g, ones, grid, v);
      break;
    case Relation::rh:
      for (std::size_t k = 0; k < grid.size(); ++k) g[k] = std::log(Y.cdf(grid[k])) - std::log(X.cdf(grid[k]));
      monotone_violation(g, ones, grid, v);
      break;
    case Relation::lr:
      for (std::size_t k = 0; k < grid.size(); ++k) g[k] = Y.log_density(grid[k]) - X.log_density(grid[k]);
      monotone_violation(g, ones, grid, v);
      break;
    case Relation::c:
      for (std::size_t k = 0; k < grid.size(); ++k) g[k] = std::log(X.hazard(grid[k])) - std::log(Y.hazard(grid[k]));
      monotone_violation(g, ones, grid, v);
      break;
    case Relation::icx: {
      v.tolerance += 1e-10;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double ix = integrated_survival(X, grid[k]);
        const double iy = integrated_survival(Y, grid[k]);
        g[k] = (ix - iy) / std::max({ix, iy, 1e-300});
        if (g[k] > v.max_violation) {
          v.max_violation = g[k];
          v.worst_point = grid[k];
        }
      }
      break;
    }
    case Relation::mrl:
      v.tolerance += 1e-10;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        g[k] = std::log(integrated_survival(Y, grid[k])) - std::log(integrated_survival(X, grid[k]));
      }
      monotone_violation(g, ones, grid, v);
      break;
    default:
      throw Error(ErrorKind::UnsupportedMode, std::string(to_string(rel)) + " is not a univariate relation");
  }
  for (double x : g) {
    if (std::isnan(x)) {
      v.status = Status::Inconclusive;
      v.note = "functional undefined at some grid point";
      break;
    }
  }
  v.grid = std::move(grid);
  v.values = std::move(g);
  settle(v);
  return v;
}

OrderVerdict check_order_uni(const std::vector<double>& Xs, const std::vector<double>& Ys, Relation rel,
                             const EmpiricalOptions& options) {
  if (Xs.empty() || Ys.empty()) throw Error(ErrorKind::EmptySample, "empirical order check on an empty sample");
  if (Xs.size() < kMinEmpiricalDraws || Ys.size() < kMinEmpiricalDraws) {
    throw Error(ErrorKind::ParamOutOfDomain, "empirical order check needs >= 1000 draws per side");
  }
  auto v = make_verdict(rel, "empirical");
  const auto X = sorted_copy(Xs);
  const auto Y = sorted_copy(Ys);
  const double nx = static_cast<double>(X.size());
  const double ny = static_cast<double>(Y.size());
  std::vector<double> pooled;
  pooled.reserve(X.size() + Y.size());
  std::merge(X.begin(), X.end(), Y.begin(), Y.end(), std::back_inserter(pooled));
  auto pooled_points = [&](std::size_t m, double lo, double hi) {
    std::vector<double> pts;
    for (double p : linear_spaced(lo, hi, m)) pts.push_back(sorted_quantile(pooled, p));
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  };
  v.tolerance = options.z_threshold;
  v.note = "z-score against the standard error";

  switch (rel) {
    case Relation::st: {
      v.tolerance = dkw_bound(X.size(), options.dkw_alpha) + dkw_bound(Y.size(), options.dkw_alpha);
      v.note = "survival excess against summed DKW bands";
      // Exact supremum over the pooled sample points.
      std::size_t ix = 0;
      std::size_t iy = 0;
      for (double t : pooled) {
        while (ix < X.size() && X[ix] <= t) ++ix;
        while (iy < Y.size() && Y[iy] <= t) ++iy;
        const double d = (nx - static_cast<double>(ix)) / nx - (ny - static_cast<double>(iy)) / ny;
        if (d > v.max_violation) {
          v.max_violation = d;
          v.worst_point = t;
        }
      }
      v.grid = pooled_points(50, 0.01, 0.99);
      for (double t : v.grid) v.values.push_back((1.0 - sorted_ecdf(X, t)) - (1.0 - sorted_ecdf(Y, t)));
      break;
    }
    case Relation::hr:
    case Relation::rh: {
      const bool surv = rel == Relation::hr;
      const auto pts = pooled_points(options.ratio_points, 1.0 / (options.ratio_points + 1.0),
                                     options.ratio_points / (options.ratio_points + 1.0));
      std::vector<double> t;
      std::vector<double> a;
      std::vector<double> b;
      for (double p : pts) {
        const double fy = sorted_ecdf(Y, p);
        const double fx = sorted_ecdf(X, p);
        const double ay = surv ? 1.0 - fy : fy;
        const double bx = surv ? 1.0 - fx : fx;
        if (ay <= 0.0 || bx <= 0.0) continue;
        t.push_back(p);
        a.push_back(ay);
        b.push_back(bx);
      }
      auto cov = [](double p, double q, double n) { return (std::min(p, q) - p * q) / n; };
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double rk = a[k] / b[k];
        v.values.push_back(rk);
        for (std::size_t j = 0; j < k; ++j) {
          const double rj = a[j] / b[j];
          const double vy = cov(a[k], a[k], ny) / (b[k] * b[k]) + cov(a[j], a[j], ny) / (b[j] * b[j]) -
                            2.0 * cov(a[j], a[k], ny) / (b[j] * b[k]);
          const double vx = std::pow(rk / b[k], 2) * cov(b[k], b[k], nx) + std::pow(rj / b[j], 2) * cov(b[j], b[j], nx) -
                            2.0 * (rk * rj / (b[k] * b[j])) * cov(b[j], b[k], nx);
          const double z = zscore(rj - rk, std::max(vx + vy, 0.0));
          if (z > v.max_violation) {
            v.max_violation = z;
            v.worst_point = t[k];
          }
        }
      }
      v.grid = t;
      break;
    }
    case Relation::lr: {
      const Kde kx(X);
      const Kde ky(Y);
      std::vector<double> levels;
      for (std::size_t k = 0; k < options.lr_points; ++k) levels.push_back((k + 0.5) / options.lr_points);
      std::vector<double> r;
      std::vector<double> var;
      for (double p : levels) {
        const double t = sorted_quantile(pooled, p);
        const double fx = kx(t);
        const double fy = ky(t);
        if (fx <= 0.0 || fy <= 0.0) continue;
        const double rho = fy / fx;
        v.grid.push_back(t);
        r.push_back(rho);
        var.push_back(rho * rho * (ky.variance(fy) / (fy * fy) + kx.variance(fx) / (fx * fx)));
      }
      for (std::size_t k = 0; k < r.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
          const double z = zscore(r[j] - r[k], var[j] + var[k]);
          if (z > v.max_violation) {
            v.max_violation = z;
            v.worst_point = v.grid[k];
          }
        }
      }
      v.values = r;
      settle(v);
      // Decreases within the error bars cannot be told apart from noise.
      if (v.status == Status::Holds && v.max_violation > 1.0) {
        v.status = Status::Inconclusive;
        v.note = "density-ratio error bars overlap a decrease";
      }
      return v;
    }
    case Relation::disp: {
      const Kde kx(X);
      const Kde ky(Y);
      const auto u = linear_spaced(0.02, 0.98, 49);
      std::vector<double> d;
      std::vector<double> se2x;
      std::vector<double> se2y;
      for (double p : u) {
        const double qx = sorted_quantile(X, p);
        const double qy = sorted_quantile(Y, p);
        d.push_back(qy - qx);
        const double fx = std::max(kx(qx), 1e-300);
        const double fy = std::max(ky(qy), 1e-300);
        se2x.push_back(p * (1.0 - p) / nx / (fx * fx));
        se2y.push_back(p * (1.0 - p) / ny / (fy * fy));
      }
      for (std::size_t k = 0; k < d.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
          const double z = zscore(d[j] - d[k], se2x[j] + se2x[k] + se2y[j] + se2y[k]);
          if (z > v.max_violation) {
            v.max_violation = z;
            v.worst_point = u[k];
          }
        }
      }
      v.grid = u;
      v.values = d;
      break;
    }
    case Relation::icx: {
      for (double t : pooled_points(options.stop_loss_points, 1.0 / (options.stop_loss_points + 1.0),
                                    options.stop_loss_points / (options.stop_loss_points + 1.0))) {
        const auto px = stop_loss(X, t);
        const auto py = stop_loss(Y, t);
        const double z = zscore(px.mean - py.mean, px.var + py.var);
        v.grid.push_back(t);
        v.values.push_back(px.mean - py.mean);
        if (z > v.max_violation) {
          v.max_violation = z;
          v.worst_point = t;
        }
      }
      break;
    }
    case Relation::mrl: {
      std::vector<double> r;
      std::vector<double> var;
      for (double t : pooled_points(options.ratio_points, 1.0 / (options.ratio_points + 1.0),
                                    options.ratio_points / (options.ratio_points + 1.0))) {
        const auto px = stop_loss(X, t);
        const auto py = stop_loss(Y, t);
        if (px.mean <= 0.0 || py.mean <= 0.0) continue;
        const double rho = py.mean / px.mean;
        v.grid.push_back(t);
        r.push_back(rho);
        var.push_back(rho * rho * (py.var / (py.mean * py.mean) + px.var / (px.mean * px.mean)));
      }
      for (std::size_t k = 0; k < r.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
          const double z = zscore(r[j] - r[k], var[j] + var[k]);
          if (z > v.max_violation) {
            v.max_violation = z;
            v.worst_point = v.grid[k];
          }
        }
      }
      v.values = r;
      break;
    }
    case Relation::c:
      v.status = Status::Inconclusive;
      v.tolerance = 0.0;
      v.note = "c-order has no empirical estimator; analytic hazards required";
      return v;
    default:
      throw Error(ErrorKind::UnsupportedMode, std::string(to_string(rel)) + " is not a univariate relation");
  }
  settle(v);
  return v;
}

OrderVerdict check_st_multi(const SampleMatrix& X, const SampleMatrix& Y, const BatteryOptions& options) {
  if (X.cols != Y.cols) {
    throw Error(ErrorKind::DimensionMismatch, "st_multi: dimensions " + std::to_string(X.cols) + " and " +
                                                  std::to_string(Y.cols) + " differ");
  }
  const std::size_t d = X.cols;
  auto rows_of = [](const SampleMatrix& m) {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (!m.clamped[i]) r.push_back(i);
    }
    return r;
  };
  const auto rx = rows_of(X);
  const auto ry = rows_of(Y);
  if (rx.empty() || ry.empty()) throw Error(ErrorKind::EmptySample, "st_multi on an empty sample");

  using Functional = std::function<double(const double*)>;
  std::vector<std::pair<std::string, Functional>> battery;
  for (std::size_t j = 0; j < d; ++j) {
    battery.emplace_back("x" + std::to_string(j + 1), [j](const double* x) { return x[j]; });
  }
  battery.emplace_back("min", [d](const double* x) { return *std::min_element(x, x + d); });
  battery.emplace_back("max", [d](const double* x) { return *std::max_element(x, x + d); });
  battery.emplace_back("sum", [d](const double* x) { return std::accumulate(x, x + d, 0.0); });
  battery.emplace_back("prod_cdf", [d](const double* x) {
    double p = 1.0;
    for (std::size_t j = 0; j < d; ++j) p *= -std::expm1(-x[j]);
    return p;
  });

  RandomStream rng(options.seed);
  std::vector<std::vector<double>> pooled(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (auto i : rx) pooled[j].push_back(X.at(i, j));
    for (auto i : ry) pooled[j].push_back(Y.at(i, j));
    std::sort(pooled[j].begin(), pooled[j].end());
  }
  for (std::size_t b = 0; b < options.orthants; ++b) {
    std::vector<double> corner(d);
    for (std::size_t j = 0; j < d; ++j) corner[j] = sorted_quantile(pooled[j], 0.1 + 0.8 * rng.uniform());
    battery.emplace_back("orthant" + std::to_string(b + 1), [corner](const double* x) {
      for (std::size_t j = 0; j < corner.size(); ++j) {
        if (!(x[j] > corner[j])) return 0.0;
      }
      return 1.0;
    });
  }
  for (std::size_t b = 0; b < options.weighted_sums; ++b) {
    std::vector<double> w(d);
    for (auto& x : w) x = rng.exponential();
    battery.emplace_back("wsum" + std::to_string(b + 1), [w](const double* x) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
      return s;
    });
  }

  OrderVerdict v;
  v.relation = "st_multi";
  v.method = "battery";
  v.tolerance = options.z_threshold;
  std::string worst = "none";
  auto moments = [&](const SampleMatrix& m, const std::vector<std::size_t>& rows, const Functional& g) {
    double s = 0.0;
    double sq = 0.0;
    for (auto i : rows) {
      const double val = g(&m.data[i * m.cols]);
      s += val;
      sq += val * val;
    }
    const double n = static_cast<double>(rows.size());
    const double mean = s / n;
    return std::pair{mean, std::max(sq / n - mean * mean, 0.0) / std::max(n - 1.0, 1.0)};
  };
  for (const auto& [name, g] : battery) {
    const auto [mx, vx] = moments(X, rx, g);
    const auto [my, vy] = moments(Y, ry, g);
    const double diff = mx - my;
    const double z = std::abs(diff) <= 1e-15 * std::max(1.0, std::abs(mx)) ? 0.0 : zscore(diff, vx + vy);
    v.values.push_back(z);
    if (z > v.max_violation) {
      v.max_violation = z;
      worst = name;
    }
  }
  v.note = "necessary-condition battery of " + std::to_string(battery.size()) +
           " increasing functionals (z-scores); worst: " + worst;
  settle(v);
  return v;
}

DsosView full_view(const models::DsosModel& model) { return DsosView{model, 0, model.n()}; }

double view_next_hazard(const DsosView& view, int failures, double last, double u) {
  const auto& m = view.model;
  if (failures < 0 || failures >= view.length) {
    throw Error(ErrorKind::ParamOutOfDomain, "history has no surviving view coordinate");
  }
  if (failures > 0) return models::dsos_conditional_hazard(m, view.offset + failures + 1, last, u);
  if (view.offset == 0) return models::dsos_conditional_hazard(m, 1, 0.0, u);
  if (view.offset != 1) {
    throw Error(ErrorKind::UnsupportedMode, "marginal hazard of an unobserved history beyond one step");
  }
  // Marginal hazard of X*_2 with X*_1 integrated out.
  const auto first = models::dsos_first_law(m);
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto surv_part = [&](double x) { return first.density(x) * models::dsos_transition_survival(m, 2, x, u); };
  auto dens_part = [&](double x) {
    const double s = models::dsos_transition_survival(m, 2, x, u);
    return s > 0.0 ? first.density(x) * s * models::dsos_conditional_hazard(m, 2, x, u) : 0.0;
  };
  double err = 0.0;
  const double survival = first.survival(u) + integrator.integrate(surv_part, 0.0, u, 1e-13, &err);
  const double density = integrator.integrate(dens_part, 0.0, u, 1e-13, &err);
  return density / survival;
}

OrderVerdict check_dyn_hr_dsos(const DsosView& X, const DsosView& Y, const DynHrOptions& options) {
  for (const auto* view : {&X, &Y}) {
    if (!view->model.gen().analytic_derivatives()) {
      throw Error(ErrorKind::NonAnalyticModel, "dyn_hr needs a generator with analytic derivatives");
    }
    for (const auto& d : view->model.dists()) {
      if (d.tolerance_hint() > 0.0) throw Error(ErrorKind::NonAnalyticModel, "dyn_hr needs closed-form step laws");
    }
    if (view->length < 1 || view->offset < 0 || view->offset + view->length > view->model.n()) {
      throw Error(ErrorKind::ParamOutOfDomain, "view outside the model's coordinates");
    }
  }
  if (X.length != Y.length) throw Error(ErrorKind::DimensionMismatch, "dyn_hr views have different lengths");

  std::vector<double> times = options.times;
  if (times.empty()) {
    for (double p : linear_spaced(0.1, 0.9, 9)) {
      times.push_back(X.model.dist(1).quantile(p));
      times.push_back(Y.model.dist(1).quantile(p));
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  OrderVerdict v;
  v.relation = "dyn_hr";
  v.method = "analytic";
  v.tolerance = options.tolerance;
  v.grid = times;
  std::size_t histories = 0;
  std::ostringstream worst;
  auto consider = [&](int i, double s, double t, double u) {
    const double eta = view_next_hazard(X, i, s, u);
    const double lambda = view_next_hazard(Y, i, t, u);
    ++histories;
    const double viol = (lambda - eta) / std::max(1.0, std::abs(lambda));
    if (std::isnan(viol)) {
      v.status = Status::Inconclusive;
      v.note = "hazard undefined on the history grid";
      return;
    }
    if (viol > v.max_violation) {
      v.max_violation = viol;
      v.worst_point = u;
      worst.str("");
      worst << "failures=" << i << " s=" << s << " t=" << t << " u=" << u;
    }
  };
  for (double u : times) consider(0, 0.0, 0.0, u);
  for (int i = 1; i < X.length; ++i) {
    for (std::size_t a = 0; a < times.size(); ++a) {
      for (std::size_t b = a; b < times.size(); ++b) {
        for (std::size_t c = b + 1; c < times.size(); ++c) consider(i, times[a], times[b], times[c]);
      }
    }
  }
  if (v.status != Status::Inconclusive) {
    v.note = "ordered-support histories only (" + std::to_string(histories) +
             " histories); next-failure hazards compared" + (worst.str().empty() ? "" : "; worst " + worst.str());
  }
  settle(v);
  return v;
}

QuantileMap dsos_quantile_map(const models::DsosModel& model, int length) {
  if (length <= 0) length = model.n();
  if (length > model.n()) throw Error(ErrorKind::DimensionMismatch, "quantile map longer than the model");
  QuantileMap q;
  q.dim = length;
  q.label = "dsos(n=" + std::to_string(model.n()) + ")[1.." + std::to_string(length) + "]";
  q.apply = [model, length](const double* u, double* x) {
    x[0] = models::step_conditional_quantile(model.gen(), model.dist(1), model.count(1), 0.0, u[0]);
    for (int i = 1; i < length; ++i) x[i] = models::dsos_conditional_quantile(model, i + 1, x[i - 1], u[i]);
  };
  return q;
}

QuantileMap dgos_quantile_map(const models::DgosModel& model, const std::vector<int>& indices,
                              const distributions::SumLawOptions& sum_options) {
  if (indices.empty()) throw Error(ErrorKind::DimensionMismatch, "no coordinates selected");
  int prev = 0;
  std::vector<DistributionSpec> blocks;
  double hint = 0.0;
  std::ostringstream label;
  label << "dgos(n=" << model.n() << ")[";
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const int p = indices[j];
    if (p <= prev || p > model.n()) throw Error(ErrorKind::NotIncreasing, "indices must increase within 1..n");
    std::vector<DistributionSpec> terms;
    for (int r = prev + 1; r <= p; ++r) {
      terms.push_back(distributions::make_w_law(model.gen(), model.count(r),
                                                model.params().alpha[static_cast<std::size_t>(r - 1)]));
    }
    blocks.push_back(terms.size() == 1 ? terms[0] : distributions::make_sum_law(terms, sum_options));
    hint = std::max(hint, blocks.back().tolerance_hint());
    label << (j ? "," : "") << p;
    prev = p;
  }
  label << "]";
  QuantileMap q;
  q.dim = static_cast<int>(indices.size());
  q.tolerance_hint = hint;
  q.label = label.str();
  const auto baseline = model.baseline();
  q.apply = [blocks, baseline](const double* u, double* x) {
    double s = 0.0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      s += blocks[j].quantile(u[j]);
      x[j] = baseline.inv_cum_hazard(s);
    }
  };
  return q;
}

QuantileMap zero_prepend(const QuantileMap& inner) {
  QuantileMap q;
  q.dim = inner.dim + 1;
  q.tolerance_hint = inner.tolerance_hint;
  q.label = "(0," + inner.label + ")";
  auto f = inner.apply;
  q.apply = [f](const double* u, double* x) {
    x[0] = 0.0;
    f(u + 1, x + 1);
  };
  return q;
}

OrderVerdict check_disp_multi(const QuantileMap& X, const QuantileMap& Y, const DispMultiOptions& options) {
  if (X.dim != Y.dim) {
    throw Error(ErrorKind::DimensionMismatch, "disp_multi: dimensions " + std::to_string(X.dim) + " and " +
                                                  std::to_string(Y.dim) + " differ");
  }
  std::vector<double> axis = options.axis.empty() ? unit_interior(9) : options.axis;
  if (axis.size() < 5) throw Error(ErrorKind::GridTooCoarse, "disp_multi needs >= 5 points per axis");
  if (!strictly_increasing(axis) || axis.front() <= 0.0 || axis.back() >= 1.0) {
    throw Error(ErrorKind::GridOutsideSupport, "disp_multi axis must be increasing inside (0,1)");
  }
  const auto d = static_cast<std::size_t>(X.dim);
  const std::size_t m = axis.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total *= m;
    if (total > 20'000'000) throw Error(ErrorKind::ParamOutOfDomain, "disp_multi tensor grid too large");
  }
  std::vector<std::size_t> stride(d);
  for (std::size_t j = 0; j < d; ++j) stride[j] = j == 0 ? 1 : stride[j - 1] * m;

  std::vector<double> diff(total * d);
  std::vector<double> scale(total * d);
  std::vector<double> u(d);
  std::vector<double> x(d);
  std::vector<double> y(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t j = 0; j < d; ++j) u[j] = axis[(idx / stride[j]) % m];
    X.apply(u.data(), x.data());
    Y.apply(u.data(), y.data());
    for (std::size_t i = 0; i < d; ++i) {
      diff[idx * d + i] = y[i] - x[i];
      scale[idx * d + i] = std::max(1.0, std::abs(x[i]) + std::abs(y[i]));
    }
  }

  OrderVerdict v;
  v.relation = "disp_multi";
  v.method = "grid";
  v.tolerance = options.tolerance + 10.0 * (X.tolerance_hint + Y.tolerance_hint);
  v.grid = axis;
  std::size_t worst_idx = 0;
  std::size_t worst_i = 0;
  std::size_t worst_axis = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t j = 0; j < d; ++j) {
      if ((idx / stride[j]) % m == m - 1) continue;
      const std::size_t nb = idx + stride[j];
      // Coordinate i depends on u_1..u_i only, so axes j <= i.
      for (std::size_t i = j; i < d; ++i) {
        const double drop = (diff[idx * d + i] - diff[nb * d + i]) / scale[idx * d + i];
        if (std::isnan(drop)) {
          v.status = Status::Inconclusive;
          v.note = "conditional quantile undefined on the grid";
          continue;
        }
        if (drop > v.max_violation) {
          v.max_violation = drop;
          worst_idx = idx;
          worst_i = i;
          worst_axis = j;
        }
      }
    }
  }
  if (v.status != Status::Inconclusive) {
    std::ostringstream os;
    os << X.label << " vs " << Y.label << "; " << m << " points per axis, " << total << " grid points";
    if (v.max_violation > 0.0) {
      os << "; worst coordinate " << worst_i + 1 << " along u_" << worst_axis + 1 << " at u=(";
      for (std::size_t j = 0; j < d; ++j) os << (j ? "," : "") << axis[(worst_idx / stride[j]) % m];
      os << ")";
      v.worst_point = axis[(worst_idx / stride[worst_axis]) % m];
    }
    v.note = os.str();
  }
  settle(v);
  return v;
}

std::string_view to_string(Majorization m) noexcept {
  switch (m) {
    case Majorization::w_super: return "w_super";
    case Majorization::p_larger: return "p_larger";
    case Majorization::rm: return "rm";
  }
  return "w_super";
}

Majorization parse_majorization(std::string_view text) {
  for (auto m : {Majorization::w_super, Majorization::p_larger, Majorization::rm}) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorKind::ParamOutOfDomain, "unknown majorization relation '" + std::string(text) + "'");
}

MajorizationResult check_majorization(const std::vector<double>& x, const std::vector<double>& y,
                                      Majorization relation) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, "majorization needs equal lengths (" + std::to_string(x.size()) + " vs " +
                                               std::to_string(y.size()) + ")");
  }
  if (relation != Majorization::w_super) {
    for (double v : x) {
      if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveEntry, "entries must be strictly positive");
    }
    for (double v : y) {
      if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveEntry, "entries must be strictly positive");
    }
  }
  const auto xs = sorted_copy(x);
  const auto ys = sorted_copy(y);
  MajorizationResult res;
  double lx = 0.0;
  double ly = 0.0;
  constexpr double eps = 1e-12;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    bool ok = true;
    switch (relation) {
      case Majorization::w_super:
        lx += xs[j];
        ly += ys[j];
        res.lhs.push_back(lx);
        res.rhs.push_back(ly);
        ok = lx <= ly + eps * std::max({1.0, std::abs(lx), std::abs(ly)});
        break;
      case Majorization::p_larger:
        lx += std::log(xs[j]);
        ly += std::log(ys[j]);
        res.lhs.push_back(std::exp(lx));
        res.rhs.push_back(std::exp(ly));
        ok = lx <= ly + eps * std::max({1.0, std::abs(lx), std::abs(ly)});
        break;
      case Majorization::rm:
        lx += 1.0 / xs[j];
        ly += 1.0 / ys[j];
        res.lhs.push_back(lx);
        res.rhs.push_back(ly);
        ok = lx >= ly - eps * std::max({1.0, lx, ly});
        break;
    }
    if (!ok && res.holds) {
      res.holds = false;
      res.first_violation = static_cast<int>(j + 1);
    }
  }
  return res;
}

double empirical_stats(const std::vector<double>& sample, StatKind kind, double at) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "empirical statistic of an empty sample");
  switch (kind) {
    case StatKind::ecdf: {
      const auto n = std::count_if(sample.begin(), sample.end(), [at](double x) { return x <= at; });
      return static_cast<double>(n) / static_cast<double>(sample.size());
    }
    case StatKind::quantile: {
      if (!(at > 0.0 && at <= 1.0)) throw Error(ErrorKind::ParamOutOfDomain, "quantile level must be in (0,1]");
      return sorted_quantile(sorted_copy(sample), at);
    }
    case StatKind::stop_loss:
    case StatKind::integrated_survival: {
      double s = 0.0;
      for (double x : sample) s += std::max(x - at, 0.0);
      return s / static_cast<double>(sample.size());
    }
  }
  return kNaN;
}

double dkw_bound(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double ks_threshold_one_sample(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double ks_threshold_two_sample(std::size_t n) { return 1.63 * std::sqrt(2.0 / static_cast<double>(n)); }

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySample, "KS statistic of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    const double t = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace osim::orderings
