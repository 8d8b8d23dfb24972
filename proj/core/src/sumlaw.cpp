#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/tools/roots.hpp>

#include "osim/distributions.hpp"
#include "osim/error.hpp"

namespace osim::distributions {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Table = std::vector<double>;

struct Stage {
  Table density;
  Table cdf;
  Table survival;
};

Table sample(const DistributionSpec& d, double h, std::size_t m, double (DistributionSpec::*fn)(double) const) {
  Table out(m + 1);
  for (std::size_t k = 0; k <= m; ++k) out[k] = (d.*fn)(static_cast<double>(k) * h);
  return out;
}

// Trapezoid approximation of (a * b)(t_k) = int_0^{t_k} a(s) b(t_k - s) ds.
Table convolve(const Table& a, const Table& b, double h) {
  const std::size_t n = a.size();
  Table out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double sum = 0.5 * (a[0] * b[k] + a[k] * b[0]);
    for (std::size_t l = 1; l < k; ++l) sum += a[l] * b[k - l];
    out[k] = sum * h;
  }
  return out;
}

std::vector<Stage> tabulate(const std::vector<DistributionSpec>& terms, double h, std::size_t m) {
  std::vector<Stage> stages;
  Stage s;
  s.density = sample(terms[0], h, m, &DistributionSpec::density);
  s.cdf = sample(terms[0], h, m, &DistributionSpec::cdf);
  s.survival = sample(terms[0], h, m, &DistributionSpec::survival);
  // Infinite density at 0 cannot be integrated by the trapezoid rule.
  if (!std::isfinite(s.density[0])) s.density[0] = 2.0 * s.density[1] - s.density[2];
  stages.push_back(s);
  for (std::size_t j = 1; j < terms.size(); ++j) {
    Table fb = sample(terms[j], h, m, &DistributionSpec::density);
    if (!std::isfinite(fb[0])) fb[0] = 2.0 * fb[1] - fb[2];
    const Table Fb = sample(terms[j], h, m, &DistributionSpec::cdf);
    const Table Sb = sample(terms[j], h, m, &DistributionSpec::survival);
    const Stage& prev = stages.back();
    Stage next;
    next.density = convolve(prev.density, fb, h);
    next.cdf = convolve(prev.density, Fb, h);
    next.survival = convolve(prev.density, Sb, h);
    for (std::size_t k = 0; k <= m; ++k) next.survival[k] += prev.survival[k];
    next.survival[0] = 1.0;
    stages.push_back(std::move(next));
  }
  return stages;
}

class SumLaw final : public Distribution {
 public:
  SumLaw(Stage stage, double step, double accuracy, std::string label)
      : step_(step),
        upper_(step * static_cast<double>(stage.density.size() - 1)),
        accuracy_(accuracy),
        label_(std::move(label)),
        cdf_table_(stage.cdf),
        survival_table_(stage.survival) {
    std::vector<double> x(stage.density.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = step_ * static_cast<double>(k);
    std::vector<double> neg_density(stage.density.size());
    for (std::size_t k = 0; k < x.size(); ++k) neg_density[k] = -stage.density[k];
    density_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        stage.density.begin(), stage.density.end(), 0.0, step_);
    cdf_ = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::vector<double>(x), std::vector<double>(stage.cdf), std::vector<double>(stage.density));
    surv_ = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::move(x), std::move(stage.survival), std::move(neg_density));
    // Exponential tail beyond the table: continue D linearly with the last hazard.
    tail_d_ = -std::log(survival_table_.back());
    tail_h_ = hazard(upper_);
  }

  double survival(double t) const override {
    if (t <= 0.0) return 1.0;
    if (t >= upper_) return std::exp(-cum_hazard(t));
    return std::clamp((*surv_)(t), 0.0, 1.0);
  }
  double cdf(double t) const override {
    if (t <= 0.0) return 0.0;
    if (t >= upper_) return -std::expm1(-cum_hazard(t));
    return std::clamp((*cdf_)(t), 0.0, 1.0);
  }
  double cum_hazard(double t) const override {
    if (t <= 0.0) return 0.0;
    if (t >= upper_) return tail_d_ + tail_h_ * (t - upper_);
    const double F = (*cdf_)(t);
    if (F < 0.5) return -std::log1p(-F);
    return -std::log((*surv_)(t));
  }
  double density(double t) const override {
    if (t < 0.0) return 0.0;
    if (t >= upper_) return tail_h_ * survival(t);
    return std::max((*density_)(t), 0.0);
  }
  double log_density(double t) const override { return std::log(density(t)); }
  double hazard(double t) const override {
    if (t < 0.0) return 0.0;
    if (t >= upper_ && tail_d_ != 0.0) return tail_h_;
    const double s = survival(t);
    return s > 0.0 ? density(t) / s : kInf;
  }
  double dlog_density(double t) const override {
    if (t >= upper_) return -tail_h_;
    return density_->prime(t) / density(t);
  }
  double inv_cum_hazard(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y < std::log(2.0)) return invert(cdf_table_, -std::expm1(-y), true);
    const double target = std::exp(-y);
    if (target <= survival_table_.back()) return upper_ + (y - tail_d_) / tail_h_;
    return invert(survival_table_, target, false);
  }
  double quantile(double p) const override {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kInf;
    if (p < 0.5) return invert(cdf_table_, p, true);
    return inv_cum_hazard(-std::log1p(-p));
  }
  double tolerance_hint() const override { return accuracy_; }
  void set_accuracy(double a) { accuracy_ = a; }
  std::string describe() const override { return label_; }

 private:
  // Solves table-interpolant(t) = target on the bracketing table cell.
  double invert(const Table& table, double target, bool increasing) const {
    std::size_t lo = 0;
    std::size_t hi = table.size() - 1;
    auto before = [&](std::size_t k) { return increasing ? table[k] <= target : table[k] >= target; };
    if (!before(lo)) return 0.0;
    if (before(hi)) return upper_;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (before(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const auto& interp = increasing ? *cdf_ : *surv_;
    auto f = [&](double t) { return interp(t) - target; };
    double a = step_ * static_cast<double>(lo);
    double b = step_ * static_cast<double>(hi);
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) return (std::abs(fa) < std::abs(fb)) ? a : b;
    std::uintmax_t iters = 100;
    auto tol = [](double u, double v) { return std::abs(v - u) <= 1e-14 * std::max(1.0, std::abs(u)); };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (r.first + r.second);
  }

  double step_;
  double upper_;
  double accuracy_;
  std::string label_;
  Table cdf_table_;
  Table survival_table_;
  std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> density_;
  std::shared_ptr<boost::math::interpolators::cubic_hermite<std::vector<double>>> cdf_;
  std::shared_ptr<boost::math::interpolators::cubic_hermite<std::vector<double>>> surv_;
  double tail_d_ = 0.0;
  double tail_h_ = 0.0;
};

// Richardson-combines the fine stage (step h) with the coarse one (step 2h)
// at the coarse nodes.
Stage extrapolate(const Stage& fine, const Stage& coarse) {
  const std::size_t m = coarse.density.size();
  Stage out;
  out.density.resize(m);
  out.cdf.resize(m);
  out.survival.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto rich = [&](const Table& f, const Table& c) { return (4.0 * f[2 * k] - c[k]) / 3.0; };
    out.density[k] = rich(fine.density, coarse.density);
    out.cdf[k] = rich(fine.cdf, coarse.cdf);
    out.survival[k] = rich(fine.survival, coarse.survival);
  }
  out.survival[0] = 1.0;
  out.cdf[0] = 0.0;
  return out;
}

}  // namespace

std::vector<DistributionSpec> make_partial_sum_laws(const std::vector<DistributionSpec>& terms,
                                                    const SumLawOptions& options) {
  if (terms.empty()) throw Error(ErrorKind::ParamOutOfDomain, "sum law needs at least one term");
  if (options.nodes < 64 || options.nodes % 4 != 0) {
    throw Error(ErrorKind::GridTooCoarse, "sum law needs a node count >= 64 divisible by 4");
  }
  if (terms.size() == 1) return {terms[0]};
  double upper = 0.0;
  for (const auto& t : terms) upper += t.quantile(1.0 - options.tail_probability);
  if (!(upper > 0.0) || !std::isfinite(upper)) {
    throw Error(ErrorKind::SupportExhausted, "sum law: non-finite truncation point");
  }
  // The union bound above is loose; a cheap pilot pass finds where the
  // total survival actually drops below the tail probability.
  {
    const std::size_t pilot = 512;
    const double hp = upper / static_cast<double>(pilot);
    const auto stages = tabulate(terms, hp, pilot);
    const Table& s = stages.back().survival;
    for (std::size_t k = 0; k <= pilot; ++k) {
      if (s[k] < options.tail_probability) {
        upper = std::min(upper, 1.1 * hp * static_cast<double>(k + 1));
        break;
      }
    }
  }
  const std::size_t m = options.nodes;
  const double h = upper / static_cast<double>(m);
  const auto t1 = tabulate(terms, h, m);
  const auto t2 = tabulate(terms, 2.0 * h, m / 2);
  const auto t4 = tabulate(terms, 4.0 * h, m / 4);

  std::vector<DistributionSpec> out;
  out.push_back(terms[0]);
  std::string label = "sum(" + terms[0].describe();
  for (std::size_t j = 1; j < terms.size(); ++j) {
    label += "+" + terms[j].describe();
    SumLaw fine(extrapolate(t1[j], t2[j]), 2.0 * h, 0.0, label + ")");
    const SumLaw rough(extrapolate(t2[j], t4[j]), 4.0 * h, 0.0, label + ")");
    // Accuracy hint: disagreement with the half-resolution table over the
    // central range, which bounds the error of the full-resolution one.
    double err = 0.0;
    const double lo = fine.quantile(1e-3);
    const double hi = fine.quantile(1.0 - 1e-3);
    for (int k = 0; k <= 400; ++k) {
      const double t = lo + (hi - lo) * k / 400.0;
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
      err = std::max({err, rel(fine.density(t), rough.density(t)), rel(fine.cdf(t), rough.cdf(t)),
                      rel(fine.survival(t), rough.survival(t))});
    }
    fine.set_accuracy(err);
    out.emplace_back(std::make_shared<SumLaw>(std::move(fine)));
  }
  return out;
}

DistributionSpec make_sum_law(const std::vector<DistributionSpec>& terms, const SumLawOptions& options) {
  return make_partial_sum_laws(terms, options).back();
}

}  // namespace osim::distributions
