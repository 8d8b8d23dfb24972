#include "osim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "osim/error.hpp"
#include "osim/grid.hpp"

namespace osim::distributions {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_positive(const std::vector<double>& params, std::size_t count, std::string_view name) {
  if (params.size() != count) {
    throw Error(ErrorKind::ParamOutOfDomain, std::string(name) + " expects " + std::to_string(count) +
                                                 " parameter(s), got " + std::to_string(params.size()));
  }
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::ParamOutOfDomain, std::string(name) + " parameters must be positive");
    }
  }
}

class Exponential final : public Distribution {
 public:
  explicit Exponential(double rate) : rate_(rate) {}
  double cum_hazard(double x) const override { return x <= 0.0 ? 0.0 : rate_ * x; }
  double inv_cum_hazard(double y) const override { return y <= 0.0 ? 0.0 : y / rate_; }
  double hazard(double x) const override { return x < 0.0 ? 0.0 : rate_; }
  double dlog_density(double) const override { return -rate_; }
  std::string describe() const override { return "exponential(" + fmt(rate_) + ")"; }

 private:
  double rate_;
};

class Weibull final : public Distribution {
 public:
  Weibull(double shape, double scale) : k_(shape), s_(scale) {}
  double cum_hazard(double x) const override { return x <= 0.0 ? 0.0 : std::pow(x / s_, k_); }
  double inv_cum_hazard(double y) const override { return y <= 0.0 ? 0.0 : s_ * std::pow(y, 1.0 / k_); }
  double hazard(double x) const override {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return k_ < 1.0 ? kInf : (k_ == 1.0 ? 1.0 / s_ : 0.0);
    return k_ / s_ * std::pow(x / s_, k_ - 1.0);
  }
  double log_density(double x) const override {
    if (x <= 0.0) return -kInf;
    return std::log(k_ / s_) + (k_ - 1.0) * std::log(x / s_) - std::pow(x / s_, k_);
  }
  double dlog_density(double x) const override { return (k_ - 1.0) / x - hazard(x); }
  std::string describe() const override { return "weibull(" + fmt(k_) + "," + fmt(s_) + ")"; }

 private:
  double k_;
  double s_;
};

class Lomax final : public Distribution {
 public:
  Lomax(double shape, double scale) : a_(shape), s_(scale) {}
  double cum_hazard(double x) const override { return x <= 0.0 ? 0.0 : a_ * std::log1p(x / s_); }
  double inv_cum_hazard(double y) const override { return y <= 0.0 ? 0.0 : s_ * std::expm1(y / a_); }
  double hazard(double x) const override { return x < 0.0 ? 0.0 : a_ / (s_ + x); }
  double dlog_density(double x) const override { return -(a_ + 1.0) / (s_ + x); }
  std::string describe() const override { return "lomax(" + fmt(a_) + "," + fmt(s_) + ")"; }

 private:
  double a_;
  double s_;
};

class Gamma final : public Distribution {
 public:
  Gamma(double shape, double rate) : a_(shape), rate_(rate) {}

  double survival(double x) const override {
    return x <= 0.0 ? 1.0 : boost::math::gamma_q(a_, rate_ * x);
  }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : boost::math::gamma_p(a_, rate_ * x); }
  double cum_hazard(double x) const override {
    if (x <= 0.0) return 0.0;
    const double q = boost::math::gamma_q(a_, rate_ * x);
    if (q > 1e-300) return -std::log(q);
    // Leading terms of the asymptotic expansion of Q(a, z).
    const double z = rate_ * x;
    return -((a_ - 1.0) * std::log(z) - z - std::lgamma(a_) + std::log1p((a_ - 1.0) / z));
  }
  double inv_cum_hazard(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y < 0.5) return boost::math::gamma_p_inv(a_, -std::expm1(-y)) / rate_;
    return boost::math::gamma_q_inv(a_, std::exp(-y)) / rate_;
  }
  double log_density(double x) const override {
    if (x <= 0.0) return a_ < 1.0 ? kInf : (a_ == 1.0 ? std::log(rate_) : -kInf);
    return a_ * std::log(rate_) + (a_ - 1.0) * std::log(x) - rate_ * x - std::lgamma(a_);
  }
  double density(double x) const override {
    if (x < 0.0) return 0.0;
    return std::exp(log_density(x));
  }
  double hazard(double x) const override {
    if (x < 0.0) return 0.0;
    return std::exp(log_density(x) + cum_hazard(x));
  }
  double quantile(double p) const override {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kInf;
    return boost::math::gamma_p_inv(a_, p) / rate_;
  }
  double dlog_density(double x) const override { return (a_ - 1.0) / x - rate_; }
  std::string describe() const override { return "gamma(" + fmt(a_) + "," + fmt(rate_) + ")"; }

 private:
  double a_;
  double rate_;
};

class Phr final : public Distribution {
 public:
  Phr(DistributionSpec base, double alpha) : base_(std::move(base)), alpha_(alpha) {}
  double cum_hazard(double x) const override { return alpha_ * base_.cum_hazard(x); }
  double inv_cum_hazard(double y) const override { return base_.inv_cum_hazard(y / alpha_); }
  double hazard(double x) const override { return alpha_ * base_.hazard(x); }
  double log_density(double x) const override {
    return std::log(alpha_) + std::log(base_.hazard(x)) - alpha_ * base_.cum_hazard(x);
  }
  double dlog_density(double x) const override {
    return base_.dlog_density(x) + (1.0 - alpha_) * base_.hazard(x);
  }
  double right_endpoint() const override { return base_.right_endpoint(); }
  double tolerance_hint() const override { return base_.tolerance_hint(); }
  std::string describe() const override { return "phr(" + base_.describe() + "," + fmt(alpha_) + ")"; }

 private:
  DistributionSpec base_;
  double alpha_;
};

class WLaw final : public Distribution {
 public:
  WLaw(copulagen::GeneratorSpec gen, double count, double alpha)
      : gen_(std::move(gen)), c_(count), alpha_(alpha) {}

  double cum_hazard(double t) const override {
    if (t <= 0.0) return 0.0;
    return -gen_.log_phi(c_ * gen_.psi_exp(alpha_ * t));
  }
  double inv_cum_hazard(double y) const override {
    if (y <= 0.0) return 0.0;
    return -gen_.log_phi(gen_.psi_exp(y) / c_) / alpha_;
  }
  double hazard(double t) const override {
    if (t < 0.0) return 0.0;
    const double z = std::max(gen_.psi_exp(alpha_ * t), 1e-300);
    return alpha_ * c_ * gen_.rel_derivative(1, c_ * z) / gen_.rel_derivative(1, z);
  }
  std::string describe() const override {
    std::string p;
    for (double v : gen_.params()) p += "," + fmt(v);
    return "w_law(" + gen_.name() + p + ";count=" + fmt(c_) + ";alpha=" + fmt(alpha_) + ")";
  }

 private:
  copulagen::GeneratorSpec gen_;
  double c_;
  double alpha_;
};

class Transformed final : public Distribution {
 public:
  Transformed(DistributionSpec outer, DistributionSpec inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}

  double cum_hazard(double x) const override { return inner_.cum_hazard(outer_.cum_hazard(x)); }
  double inv_cum_hazard(double y) const override {
    return outer_.inv_cum_hazard(inner_.inv_cum_hazard(y));
  }
  double hazard(double x) const override {
    return inner_.hazard(outer_.cum_hazard(x)) * outer_.hazard(x);
  }
  double survival(double x) const override { return inner_.survival(outer_.cum_hazard(x)); }
  double cdf(double x) const override { return inner_.cdf(outer_.cum_hazard(x)); }
  double density(double x) const override {
    if (x < 0.0) return 0.0;
    return inner_.density(outer_.cum_hazard(x)) * outer_.hazard(x);
  }
  double log_density(double x) const override {
    return inner_.log_density(outer_.cum_hazard(x)) + std::log(outer_.hazard(x));
  }
  double quantile(double p) const override { return outer_.inv_cum_hazard(inner_.quantile(p)); }
  double dlog_density(double x) const override {
    const double h = outer_.hazard(x);
    return inner_.dlog_density(outer_.cum_hazard(x)) * h + outer_.dlog_density(x) + h;
  }
  double right_endpoint() const override { return outer_.right_endpoint(); }
  double tolerance_hint() const override {
    return std::max(outer_.tolerance_hint(), inner_.tolerance_hint());
  }
  std::string describe() const override {
    return "transformed(" + outer_.describe() + "," + inner_.describe() + ")";
  }

 private:
  DistributionSpec outer_;
  DistributionSpec inner_;
};

}  // namespace

double Distribution::survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-cum_hazard(x)); }

double Distribution::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-cum_hazard(x)); }

double Distribution::density(double x) const {
  if (x < 0.0) return 0.0;
  const double h = hazard(x);
  if (h == 0.0) return 0.0;
  return h * survival(x);
}

double Distribution::log_density(double x) const { return std::log(hazard(x)) - cum_hazard(x); }

double Distribution::quantile(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return right_endpoint();
  return inv_cum_hazard(-std::log1p(-p));
}

double Distribution::reversed_hazard(double x) const {
  const double F = cdf(x);
  if (F <= 0.0) return kInf;
  return density(x) / F;
}

double Distribution::dlog_density(double x) const {
  double h = 1e-5 * std::max(1.0, x);
  if (x - h <= 0.0) h = 0.5 * x;
  return (log_density(x + h) - log_density(x - h)) / (2.0 * h);
}

double Distribution::right_endpoint() const { return kInf; }

DistributionSpec::DistributionSpec(std::shared_ptr<const Distribution> impl) : impl_(std::move(impl)) {}

DistributionSpec builtin_distribution(std::string_view name, const std::vector<double>& params) {
  if (name == "exponential") {
    require_positive(params, 1, name);
    return DistributionSpec(std::make_shared<Exponential>(params[0]));
  }
  if (name == "weibull") {
    require_positive(params, 2, name);
    return DistributionSpec(std::make_shared<Weibull>(params[0], params[1]));
  }
  if (name == "lomax") {
    require_positive(params, 2, name);
    return DistributionSpec(std::make_shared<Lomax>(params[0], params[1]));
  }
  if (name == "gamma") {
    require_positive(params, 2, name);
    return DistributionSpec(std::make_shared<Gamma>(params[0], params[1]));
  }
  throw Error(ErrorKind::UnknownDistribution, std::string(name));
}

std::vector<std::string> builtin_distribution_names() {
  return {"exponential", "weibull", "lomax", "gamma"};
}

DistributionSpec make_phr(const DistributionSpec& baseline, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::ParamOutOfDomain, "phr alpha must be positive");
  }
  return DistributionSpec(std::make_shared<Phr>(baseline, alpha));
}

DistributionSpec make_w_law(const copulagen::GeneratorSpec& gen, double count, double alpha) {
  if (!(count > 0.0)) throw Error(ErrorKind::ParamOutOfDomain, "w-law count must be positive");
  if (!(alpha > 0.0)) throw Error(ErrorKind::ParamOutOfDomain, "w-law alpha must be positive");
  return DistributionSpec(std::make_shared<WLaw>(gen, count, alpha));
}

DistributionSpec make_transformed(const DistributionSpec& outer, const DistributionSpec& inner) {
  return DistributionSpec(std::make_shared<Transformed>(outer, inner));
}

std::string_view to_string(AgingClass c) noexcept {
  switch (c) {
    case AgingClass::ILR: return "ILR";
    case AgingClass::DLR: return "DLR";
    case AgingClass::IFR: return "IFR";
    case AgingClass::DFR: return "DFR";
    case AgingClass::DRFR: return "DRFR";
  }
  return "?";
}

AgingClass parse_aging_class(std::string_view text) {
  for (AgingClass c : {AgingClass::ILR, AgingClass::DLR, AgingClass::IFR, AgingClass::DFR, AgingClass::DRFR}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorKind::ConfigParse, "unknown aging class '" + std::string(text) + "'");
}

std::vector<double> default_aging_grid(const DistributionSpec& dist) {
  return log_spaced(dist.quantile(1e-4), dist.quantile(0.999), 200);
}

OrderVerdict check_aging_class(const DistributionSpec& dist, AgingClass cls,
                               const std::vector<double>& grid) {
  if (grid.size() < 100) throw Error(ErrorKind::GridTooCoarse, "aging grid needs >= 100 points");
  const double end = dist.right_endpoint();
  for (double x : grid) {
    if (!(x > 0.0) || !(x < end)) {
      throw Error(ErrorKind::GridOutsideSupport, "aging grid point " + fmt(x) + " outside (0, " + fmt(end) + ")");
    }
  }
  if (!strictly_increasing(grid)) throw Error(ErrorKind::GridTooCoarse, "aging grid must be strictly increasing");

  bool increasing = false;
  OrderVerdict v;
  v.relation = std::string(to_string(cls));
  v.direction = "class";
  v.method = "analytic";
  v.grid = grid;
  v.values.reserve(grid.size());
  for (double x : grid) {
    switch (cls) {
      case AgingClass::ILR: v.values.push_back(dist.dlog_density(x)); break;
      case AgingClass::DLR: v.values.push_back(dist.dlog_density(x)); increasing = true; break;
      case AgingClass::IFR: v.values.push_back(dist.hazard(x)); increasing = true; break;
      case AgingClass::DFR: v.values.push_back(dist.hazard(x)); break;
      case AgingClass::DRFR: v.values.push_back(dist.reversed_hazard(x)); break;
    }
  }
  v.tolerance = std::max(kAgingTolerance, dist.tolerance_hint());
  v.max_violation = 0.0;
  v.worst_point = grid.front();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = v.values[i - 1];
    const double b = v.values[i];
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    const double drop = (increasing ? a - b : b - a) / scale;
    if (drop > v.max_violation) {
      v.max_violation = drop;
      v.worst_point = grid[i];
    }
  }
  settle(v);
  return v;
}

OrderVerdict check_aging_class(const DistributionSpec& dist, AgingClass cls) {
  return check_aging_class(dist, cls, default_aging_grid(dist));
}

}  // namespace osim::distributions
