#include "osim/copulagen.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "osim/error.hpp"
#include "osim/grid.hpp"

namespace osim::copulagen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxFiniteDifferenceOrder = 4;
constexpr int kCacheSlots = 32;

// Complete Bell polynomial B_k(x_1..x_k); x is 1-based (x[0] unused).
double complete_bell(int k, const std::vector<double>& x) {
  std::vector<double> b(static_cast<std::size_t>(k) + 1, 0.0);
  b[0] = 1.0;
  for (int m = 0; m < k; ++m) {
    double sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= m; ++i) {
      sum += binom * b[static_cast<std::size_t>(m - i)] * x[static_cast<std::size_t>(i + 1)];
      binom = binom * static_cast<double>(m - i) / static_cast<double>(i + 1);
    }
    b[static_cast<std::size_t>(m + 1)] = sum;
  }
  return b[static_cast<std::size_t>(k)];
}

double falling_factorial(double a, int j) {
  double out = 1.0;
  for (int i = 0; i < j; ++i) out *= (a - i);
  return out;
}

// Polylogarithm of non-positive integer order, Li_{-n}(z) for 0 <= z < 1.
double polylog_neg(int n, double z) {
  if (n == 0) return z / (1.0 - z);
  // Eulerian numbers A(n, k).
  std::vector<double> row{1.0};
  for (int m = 2; m <= n; ++m) {
    std::vector<double> next(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
      double v = 0.0;
      if (k < m - 1) v += (k + 1) * row[static_cast<std::size_t>(k)];
      if (k >= 1) v += (m - k) * row[static_cast<std::size_t>(k - 1)];
      next[static_cast<std::size_t>(k)] = v;
    }
    row = std::move(next);
  }
  double poly = 0.0;
  for (int k = n - 1; k >= 0; --k) poly = poly * z + row[static_cast<std::size_t>(k)];
  return z * poly / std::pow(1.0 - z, n + 1);
}

// Generators of the form phi = exp(-g(u)); g_deriv(j, u) is the j-th
// derivative of g (j >= 1).
GeneratorSpec::Definition exp_family(std::string name, std::vector<double> params,
                                     std::function<double(double)> g,
                                     std::function<double(int, double)> g_deriv,
                                     std::function<double(double)> psi,
                                     std::function<double(double)> psi_exp) {
  GeneratorSpec::Definition d;
  d.name = std::move(name);
  d.params = std::move(params);
  d.log_phi = [g](double u) { return -g(u); };
  d.phi = [g](double u) { return std::exp(-g(u)); };
  d.rel_derivative = [g_deriv](int k, double u) {
    if (k == 0) return 1.0;
    std::vector<double> x(static_cast<std::size_t>(k) + 1, 0.0);
    for (int j = 1; j <= k; ++j) x[static_cast<std::size_t>(j)] = -g_deriv(j, u);
    return complete_bell(k, x);
  };
  d.phi_d1 = [g, g_deriv](double u) { return -g_deriv(1, u) * std::exp(-g(u)); };
  d.phi_d2 = [g, g_deriv](double u) {
    const double g1 = g_deriv(1, u);
    return (g1 * g1 - g_deriv(2, u)) * std::exp(-g(u));
  };
  d.log_phi_d2 = [g_deriv](double u) { return -g_deriv(2, u); };
  d.psi = std::move(psi);
  d.psi_exp = std::move(psi_exp);
  return d;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ParamOutOfDomain, what);
}

void require_count(const std::vector<double>& params, std::size_t count, std::string_view name) {
  if (params.size() != count) {
    std::ostringstream os;
    os << name << " expects " << count << " parameter(s), got " << params.size();
    throw Error(ErrorKind::ParamOutOfDomain, os.str());
  }
}

double central_difference(const std::function<double(double)>& f, int order, double u, double h) {
  const double center = std::max(u, 0.5 * order * h);
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= order; ++i) {
    const double x = center + (0.5 * order - i) * h;
    sum += ((i % 2 == 0) ? 1.0 : -1.0) * binom * f(x);
    binom = binom * (order - i) / (i + 1);
  }
  return sum / std::pow(h, order);
}

double finite_difference_step(int order) {
  if (order <= 2) return 1e-4;
  if (order == 3) return 1e-3;
  return 1e-2;
}

}  // namespace

struct GeneratorSpec::Impl {
  Definition def;
  bool analytic = false;
  bool independence = false;
  mutable std::array<std::atomic<int>, kCacheSlots> validity{};
};

GeneratorSpec::GeneratorSpec(Definition def) {
  auto impl = std::make_shared<Impl>();
  impl->analytic = static_cast<bool>(def.rel_derivative);
  impl->independence = def.name == "independence";
  impl->def = std::move(def);
  for (auto& v : impl->validity) v.store(-1);
  impl_ = std::move(impl);
}

GeneratorSpec GeneratorSpec::custom(std::string name, std::function<double(double)> phi,
                                    std::function<double(double)> psi,
                                    std::function<double(double)> phi_d1,
                                    std::function<double(double)> phi_d2) {
  Definition d;
  d.name = std::move(name);
  d.phi = std::move(phi);
  d.psi = std::move(psi);
  d.phi_d1 = std::move(phi_d1);
  d.phi_d2 = std::move(phi_d2);
  return GeneratorSpec(std::move(d));
}

const std::string& GeneratorSpec::name() const noexcept { return impl_->def.name; }
const std::vector<double>& GeneratorSpec::params() const noexcept { return impl_->def.params; }

double GeneratorSpec::phi(double u) const { return impl_->def.phi(u); }

double GeneratorSpec::psi(double s) const {
  if (impl_->def.psi) return impl_->def.psi(s);
  if (s >= 1.0) return 0.0;
  if (s <= 0.0) return kInf;
  const auto& phi = impl_->def.phi;
  double lo = 0.0;
  double hi = 60.0;
  while (phi(hi) > s) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw Error(ErrorKind::RootNotBracketed, "psi bisection: phi does not reach target");
  }
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double GeneratorSpec::derivative(int order, double u) const {
  if (order == 0) return phi(u);
  if (impl_->analytic) return phi(u) * impl_->def.rel_derivative(order, u);
  const auto& d = impl_->def;
  if (order == 1 && d.phi_d1) return d.phi_d1(u);
  if (order == 2 && d.phi_d2) return d.phi_d2(u);
  int base = 0;
  if (d.phi_d2 && order >= 2) {
    base = 2;
  } else if (d.phi_d1 && order >= 1) {
    base = 1;
  }
  const int fd_order = order - base;
  if (fd_order > kMaxFiniteDifferenceOrder) {
    throw Error(ErrorKind::DerivativeUnavailable,
                "derivative of order " + std::to_string(order) + " needs analytic derivatives");
  }
  const std::function<double(double)>& f = base == 2 ? d.phi_d2 : (base == 1 ? d.phi_d1 : d.phi);
  return central_difference(f, fd_order, u, finite_difference_step(fd_order));
}

double GeneratorSpec::phi_d1(double u) const {
  if (impl_->def.phi_d1) return impl_->def.phi_d1(u);
  return derivative(1, u);
}

double GeneratorSpec::phi_d2(double u) const {
  if (impl_->def.phi_d2) return impl_->def.phi_d2(u);
  return derivative(2, u);
}

double GeneratorSpec::log_phi(double u) const {
  if (impl_->def.log_phi) return impl_->def.log_phi(u);
  return std::log(phi(u));
}

double GeneratorSpec::psi_exp(double t) const {
  if (impl_->def.psi_exp) return impl_->def.psi_exp(t);
  return psi(std::exp(-t));
}

double GeneratorSpec::rel_derivative(int order, double u) const {
  if (order == 0) return 1.0;
  if (impl_->analytic) return impl_->def.rel_derivative(order, u);
  return derivative(order, u) / phi(u);
}

double GeneratorSpec::log_phi_d2(double u) const {
  if (impl_->def.log_phi_d2) return impl_->def.log_phi_d2(u);
  const double r1 = rel_derivative(1, u);
  return rel_derivative(2, u) - r1 * r1;
}

bool GeneratorSpec::analytic_derivatives() const noexcept {
  return impl_->analytic || (impl_->def.phi_d1 && impl_->def.phi_d2);
}

bool GeneratorSpec::has_frailty() const noexcept { return static_cast<bool>(impl_->def.frailty); }

double GeneratorSpec::sample_frailty(RandomStream& rng) const {
  if (!impl_->def.frailty) throw Error(ErrorKind::UnsupportedMode, name() + " has no frailty sampler");
  return impl_->def.frailty(rng);
}

bool GeneratorSpec::is_independence() const noexcept { return impl_->independence; }

int GeneratorSpec::max_derivative_order() const noexcept {
  if (impl_->analytic) return std::numeric_limits<int>::max();
  int base = impl_->def.phi_d2 ? 2 : (impl_->def.phi_d1 ? 1 : 0);
  return base + kMaxFiniteDifferenceOrder;
}

bool GeneratorSpec::valid_in_dimension(int dim) const {
  if (dim <= 1) return true;
  const bool cacheable = dim < kCacheSlots;
  if (cacheable) {
    const int cached = impl_->validity[static_cast<std::size_t>(dim)].load();
    if (cached >= 0) return cached == 1;
  }
  bool ok = false;
  try {
    ok = validate_generator(*this, dim).empty();
  } catch (const Error&) {
    ok = false;
  }
  if (cacheable) impl_->validity[static_cast<std::size_t>(dim)].store(ok ? 1 : 0);
  return ok;
}

GeneratorSpec builtin_generator(std::string_view name, const std::vector<double>& params) {
  if (name == "independence") {
    require_count(params, 0, name);
    auto d = exp_family(
        "independence", params, [](double u) { return u; },
        [](int j, double) { return j == 1 ? 1.0 : 0.0; },
        [](double s) { return -std::log(s); }, [](double t) { return t; });
    d.frailty = [](RandomStream&) { return 1.0; };
    return GeneratorSpec(std::move(d));
  }
  if (name == "clayton") {
    require_count(params, 1, name);
    const double theta = params[0];
    require(theta > 0.0, "clayton requires theta > 0");
    GeneratorSpec::Definition d;
    d.name = "clayton";
    d.params = params;
    const double a = 1.0 / theta;
    d.phi = [a](double u) { return std::pow(1.0 + u, -a); };
    d.log_phi = [a](double u) { return -a * std::log1p(u); };
    d.psi = [theta](double s) { return std::expm1(-theta * std::log(s)); };
    d.psi_exp = [theta](double t) { return std::expm1(theta * t); };
    d.rel_derivative = [a](int k, double u) {
      double c = 1.0;
      for (int j = 0; j < k; ++j) c *= -(a + j);
      return c * std::pow(1.0 + u, -k);
    };
    d.phi_d1 = [a](double u) { return -a * std::pow(1.0 + u, -a - 1.0); };
    d.phi_d2 = [a](double u) { return a * (a + 1.0) * std::pow(1.0 + u, -a - 2.0); };
    d.log_phi_d2 = [a](double u) { return a / ((1.0 + u) * (1.0 + u)); };
    d.frailty = [a](RandomStream& rng) { return rng.gamma(a); };
    return GeneratorSpec(std::move(d));
  }
  if (name == "gumbel") {
    require_count(params, 1, name);
    const double theta = params[0];
    require(theta >= 1.0, "gumbel requires theta >= 1");
    const double a = 1.0 / theta;
    auto d = exp_family(
        "gumbel", params, [a](double u) { return std::pow(u, a); },
        [a](int j, double u) { return falling_factorial(a, j) * std::pow(u, a - j); },
        [theta](double s) { return std::pow(-std::log(s), theta); },
        [theta](double t) { return std::pow(t, theta); });
    // Kanter's representation of the positive stable law with Laplace
    // transform exp(-s^a).
    d.frailty = [a](RandomStream& rng) {
      if (a == 1.0) return 1.0;
      const double v = std::numbers::pi * rng.uniform();
      const double e = rng.exponential();
      const double lead = std::sin(a * v) / std::pow(std::sin(v), 1.0 / a);
      return lead * std::pow(std::sin((1.0 - a) * v) / e, (1.0 - a) / a);
    };
    return GeneratorSpec(std::move(d));
  }
  if (name == "ex61") {
    require_count(params, 1, name);
    const double theta = params[0];
    require(theta > 0.0 && theta <= 1.0, "ex61 requires theta1 in (0, 1]");
    return GeneratorSpec(exp_family(
        "ex61", params, [theta](double u) { return std::expm1(u) / theta; },
        [theta](int, double u) { return std::exp(u) / theta; },
        [theta](double s) { return std::log1p(-theta * std::log(s)); },
        [theta](double t) { return std::log1p(theta * t); }));
  }
  if (name == "ex62") {
    require_count(params, 1, name);
    const double theta = params[0];
    require(theta >= 1.0, "ex62 requires theta2 in [1, inf)");
    const double a = 1.0 / theta;
    // phi = 1 - h, h = (1 - e^{-u})^a = exp(-q), q = -a ln(1 - e^{-u}).
    GeneratorSpec::Definition d;
    d.name = "ex62";
    d.params = params;
    auto h_of = [a](double u) { return std::pow(-std::expm1(-u), a); };
    auto h_rel = [a](int k, double u) {
      const double z = std::exp(-u);
      std::vector<double> x(static_cast<std::size_t>(k) + 1, 0.0);
      for (int j = 1; j <= k; ++j) {
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;
        x[static_cast<std::size_t>(j)] = a * sign * polylog_neg(j - 1, z);
      }
      return complete_bell(k, x);
    };
    // 1 - h without cancellation for large u.
    auto one_minus_h = [a](double u) { return -std::expm1(a * std::log1p(-std::exp(-u))); };
    d.phi = one_minus_h;
    d.log_phi = [one_minus_h](double u) { return std::log(one_minus_h(u)); };
    d.rel_derivative = [h_of, h_rel, one_minus_h](int k, double u) {
      if (k == 0) return 1.0;
      return -h_of(u) * h_rel(k, u) / one_minus_h(u);
    };
    d.phi_d1 = [h_of, h_rel](double u) { return -h_of(u) * h_rel(1, u); };
    d.phi_d2 = [h_of, h_rel](double u) { return -h_of(u) * h_rel(2, u); };
    d.psi = [theta](double s) { return -std::log1p(-std::pow(1.0 - s, theta)); };
    d.psi_exp = [theta](double t) { return -std::log1p(-std::pow(-std::expm1(-t), theta)); };
    return GeneratorSpec(std::move(d));
  }
  if (name == "ex63") {
    require_count(params, 1, name);
    const double theta = params[0];
    require(theta > 0.0, "ex63 requires theta3 in (0, inf)");
    const double a = 1.0 / theta;
    return GeneratorSpec(exp_family(
        "ex63", params, [a](double u) { return std::expm1(a * std::log1p(u)); },
        [a](int j, double u) { return falling_factorial(a, j) * std::pow(1.0 + u, a - j); },
        [theta](double s) { return std::expm1(theta * std::log1p(-std::log(s))); },
        [theta](double t) { return std::expm1(theta * std::log1p(t)); }));
  }
  throw Error(ErrorKind::UnknownGenerator, std::string(name));
}

std::vector<std::string> builtin_generator_names() {
  return {"independence", "clayton", "gumbel", "ex61", "ex62", "ex63"};
}

namespace {

double r_value(const GeneratorSpec& gen, double u) { return u * gen.rel_derivative(1, u); }

double g_value(const GeneratorSpec& gen, double u) {
  const double r1 = gen.rel_derivative(1, u);
  if (r1 == 0.0) throw Error(ErrorKind::DegenerateDenominator, "phi'(u) = 0");
  return u * gen.rel_derivative(2, u) / r1;
}

double h_value(const GeneratorSpec& gen, double u) {
  const double denom = std::expm1(-gen.log_phi(u));
  if (denom == 0.0) throw Error(ErrorKind::DegenerateDenominator, "phi(u) = 1");
  return u * gen.rel_derivative(1, u) / denom;
}

}  // namespace

GeneratorDiagnostics diagnostics(const GeneratorSpec& gen, double u) {
  if (!(u > 0.0)) throw Error(ErrorKind::DegenerateDenominator, "diagnostics require u > 0");
  GeneratorDiagnostics out{u, 0.0, 0.0, 0.0};
  out.H = h_value(gen, u);
  out.R = r_value(gen, u);
  out.G = g_value(gen, u);
  return out;
}

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::R_RATIO_POS_INC: return "R_RATIO_POS_INC";
    case Condition::R_RATIO_INC: return "R_RATIO_INC";
    case Condition::H_RATIO_NEG_DEC: return "H_RATIO_NEG_DEC";
    case Condition::H_RATIO_DEC: return "H_RATIO_DEC";
    case Condition::R_DEC: return "R_DEC";
    case Condition::GR_DIFF_POS_INC: return "GR_DIFF_POS_INC";
  }
  return "?";
}

Condition parse_condition(std::string_view text) {
  for (Condition c : {Condition::R_RATIO_POS_INC, Condition::R_RATIO_INC, Condition::H_RATIO_NEG_DEC,
                      Condition::H_RATIO_DEC, Condition::R_DEC, Condition::GR_DIFF_POS_INC}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorKind::ConfigParse, "unknown condition '" + std::string(text) + "'");
}

double condition_functional(const GeneratorSpec& gen, Condition c, std::optional<int> n, double u) {
  switch (c) {
    case Condition::R_RATIO_POS_INC:
    case Condition::R_RATIO_INC: {
      if (gen.analytic_derivatives()) {
        const double r1 = gen.rel_derivative(1, u);
        if (r1 == 0.0) throw Error(ErrorKind::DegenerateDenominator, "phi'(u) = 0");
        // u R'/R = 1 + u (ln phi)'' / (ln phi)'
        return 1.0 + u * gen.log_phi_d2(u) / r1;
      }
      const double h = 1e-6 * std::max(1.0, u);
      const double lo = std::max(u - h, 0.5 * u);
      const double hi = u + h;
      const double dr = (r_value(gen, hi) - r_value(gen, lo)) / (hi - lo);
      return u * dr / r_value(gen, u);
    }
    case Condition::H_RATIO_NEG_DEC:
    case Condition::H_RATIO_DEC:
      return 1.0 + g_value(gen, u) + h_value(gen, u);
    case Condition::R_DEC:
      return r_value(gen, u);
    case Condition::GR_DIFF_POS_INC: {
      if (!n || *n < 1) throw Error(ErrorKind::ParamOutOfDomain, "GR_DIFF_POS_INC needs n >= 1");
      const double r = r_value(gen, u);
      if (r == 0.0) throw Error(ErrorKind::DegenerateDenominator, "R(u) = 0");
      return (g_value(gen, *n * u) - g_value(gen, u)) / r;
    }
  }
  return 0.0;
}

const std::vector<double>& default_grid() {
  static const std::vector<double> grid = log_spaced(1e-4, 20.0, 200);
  return grid;
}

ConditionVerdict check_generator_condition(const GeneratorSpec& gen, Condition c,
                                           std::optional<int> n, const std::vector<double>& grid) {
  if (grid.size() < 50 || !strictly_increasing(grid) || grid.front() > 1e-3 || grid.back() < 10.0) {
    throw Error(ErrorKind::GridTooCoarse,
                "condition grid needs >= 50 strictly increasing points spanning [1e-3, 10]");
  }
  if ((c == Condition::GR_DIFF_POS_INC) != n.has_value()) {
    throw Error(ErrorKind::ParamOutOfDomain, "n is required iff condition is GR_DIFF_POS_INC");
  }

  enum class Sign { None, Positive, Negative };
  enum class Trend { Increasing, Decreasing };
  Sign sign = Sign::None;
  Trend trend = Trend::Increasing;
  switch (c) {
    case Condition::R_RATIO_POS_INC: sign = Sign::Positive; trend = Trend::Increasing; break;
    case Condition::R_RATIO_INC: trend = Trend::Increasing; break;
    case Condition::H_RATIO_NEG_DEC: sign = Sign::Negative; trend = Trend::Decreasing; break;
    case Condition::H_RATIO_DEC: trend = Trend::Decreasing; break;
    case Condition::R_DEC: trend = Trend::Decreasing; break;
    case Condition::GR_DIFF_POS_INC: sign = Sign::Positive; trend = Trend::Increasing; break;
  }

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = condition_functional(gen, c, n, grid[i]);

  double worst = -kInf;
  double worst_point = grid.front();
  auto consider = [&](double v, double at) {
    if (std::isnan(v)) v = kInf;
    if (v > worst) {
      worst = v;
      worst_point = at;
    }
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = values[i];
    const double scale = std::max(1.0, std::abs(v));
    if (sign == Sign::Positive) consider(-v / scale, grid[i]);
    if (sign == Sign::Negative) consider(v / scale, grid[i]);
    if (i > 0) {
      const double prev = values[i - 1];
      const double s = std::max({1.0, std::abs(prev), std::abs(v)});
      const double drop = trend == Trend::Increasing ? (prev - v) : (v - prev);
      consider(drop / s, grid[i]);
    }
  }

  ConditionVerdict out{};
  out.condition = c;
  out.n = n;
  out.tolerance = kConditionTolerance;
  out.worst_violation = worst - kConditionTolerance;
  out.worst_point = worst_point;
  out.status = out.worst_violation <= 0.0 ? Status::Holds : Status::Violated;
  out.grid_lo = grid.front();
  out.grid_hi = grid.back();
  out.grid_size = grid.size();
  out.finite_difference = !gen.analytic_derivatives();
  return out;
}

std::vector<ClauseViolation> validate_generator(const GeneratorSpec& gen, int dim,
                                                const std::vector<double>& grid) {
  if (dim < 2) throw Error(ErrorKind::ParamOutOfDomain, "validate_generator needs dim >= 2");
  const int top = dim - 2;
  if (top > gen.max_derivative_order()) {
    throw Error(ErrorKind::DerivativeUnavailable,
                "dimension " + std::to_string(dim) + " needs derivatives of order " +
                    std::to_string(top));
  }
  const bool exact_top = gen.analytic_derivatives() &&
                         (top + 2 <= 2 || gen.max_derivative_order() == std::numeric_limits<int>::max());
  std::vector<ClauseViolation> out;

  auto sign_tolerance = [&](int order) {
    if (gen.analytic_derivatives() && (order <= 2 || gen.max_derivative_order() > 1000)) return 1e-9;
    return order <= 2 ? 1e-6 : 1e-5;
  };

  // (-1)^k phi^{(k)} >= 0. With phi > 0 this is the sign of phi^{(k)}/phi.
  auto signed_rel = [&](int k, double u) {
    const double r = gen.rel_derivative(k, u);
    return (k % 2 == 0) ? r : -r;
  };

  auto sign_clause = [&](int k, const std::string& clause, int order) {
    double worst = 0.0;
    double at = 0.0;
    const double tol = sign_tolerance(k);
    for (double u : grid) {
      const double v = signed_rel(k, u);
      if (std::isnan(v)) continue;
      if (v < -tol && -v > worst) {
        worst = -v;
        at = u;
      }
    }
    if (worst > 0.0) out.push_back({clause, order, at, worst});
  };

  for (int k = 0; k <= top; ++k) sign_clause(k, "sign", k);

  if (exact_top) {
    // (-1)^top phi^{(top)} nonincreasing and convex <=> signs of orders top+1, top+2.
    sign_clause(top + 1, "nonincreasing", top);
    sign_clause(top + 2, "convex", top);
    return out;
  }

  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = gen.derivative(top, grid[i]);
    d[i] = (top % 2 == 0) ? v : -v;
  }
  const double tol = sign_tolerance(top);
  double worst_rise = 0.0;
  double rise_at = 0.0;
  double worst_bend = 0.0;
  double bend_at = 0.0;
  std::vector<double> slope(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double rise = d[i + 1] - d[i];
    const double scale = std::max({1.0, std::abs(d[i]), std::abs(d[i + 1])});
    if (rise > tol * scale && rise > worst_rise) {
      worst_rise = rise;
      rise_at = grid[i + 1];
    }
    slope[i] = rise / (grid[i + 1] - grid[i]);
  }
  for (std::size_t i = 0; i + 1 < slope.size(); ++i) {
    const double bend = slope[i] - slope[i + 1];
    const double scale = std::max({1.0, std::abs(slope[i]), std::abs(slope[i + 1])});
    if (bend > tol * scale && bend > worst_bend) {
      worst_bend = bend;
      bend_at = grid[i + 1];
    }
  }
  if (worst_rise > 0.0) out.push_back({"nonincreasing", top, rise_at, worst_rise});
  if (worst_bend > 0.0) out.push_back({"convex", top, bend_at, worst_bend});
  return out;
}

namespace {

std::vector<double> frailty_draw(const GeneratorSpec& gen, int dim, RandomStream& rng) {
  const double s = gen.sample_frailty(rng);
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (auto& u : out) {
    const double e = rng.exponential();
    u = gen.phi(e / s);
  }
  return out;
}

// U_1 uniform; then U_k given the previous ones has conditional CDF
// phi^{(k-1)}(s + psi(u)) / phi^{(k-1)}(s), s = sum of previous psi values.
std::vector<double> conditional_draw(const GeneratorSpec& gen, int dim, RandomStream& rng) {
  std::vector<double> out(static_cast<std::size_t>(dim));
  out[0] = rng.uniform();
  double s = gen.psi(out[0]);
  for (int k = 2; k <= dim; ++k) {
    const int order = k - 1;
    const double target = std::log(rng.uniform());
    const double log_base = gen.log_phi(s);
    const double rel_base = gen.rel_derivative(order, s);
    auto log_ratio = [&](double t) {
      const double rel = gen.rel_derivative(order, s + t);
      return gen.log_phi(s + t) - log_base + std::log(rel / rel_base) - target;
    };
    double hi = 60.0;
    while (log_ratio(hi) > 0.0) {
      hi *= 2.0;
      if (hi > 1e280) throw Error(ErrorKind::RootNotBracketed, "conditional inversion: root beyond 1e280");
    }
    const double f_lo = log_ratio(0.0);
    double t = 0.0;
    if (f_lo > 0.0) {
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a)); };
      const auto bracket = boost::math::tools::toms748_solve(log_ratio, 0.0, hi, f_lo, log_ratio(hi), tol, iters);
      t = 0.5 * (bracket.first + bracket.second);
    } else if (f_lo < 0.0) {
      throw Error(ErrorKind::RootNotBracketed, "conditional inversion: ratio below target at t=0");
    }
    out[static_cast<std::size_t>(k - 1)] = gen.phi(t);
    s += t;
  }
  return out;
}

}  // namespace

std::vector<double> sample_copula_uniforms(const GeneratorSpec& gen, int dim, RandomStream& rng,
                                           CopulaRoute route) {
  if (dim < 1) throw Error(ErrorKind::ParamOutOfDomain, "dim must be >= 1");
  if (dim == 1) return {rng.uniform()};
  const bool use_frailty =
      route == CopulaRoute::Frailty || (route == CopulaRoute::Auto && gen.has_frailty());
  if (use_frailty) return frailty_draw(gen, dim, rng);
  if (dim - 1 > gen.max_derivative_order()) {
    throw Error(ErrorKind::DerivativeUnavailable, "conditional inversion needs derivatives of order dim-1");
  }
  return conditional_draw(gen, dim, rng);
}

CopulaSampler::CopulaSampler(GeneratorSpec gen, int dim, CopulaRoute route)
    : gen_(std::move(gen)), dim_(dim), route_(route) {
  if (dim_ < 1) throw Error(ErrorKind::ParamOutOfDomain, "dim must be >= 1");
  if (dim_ >= 2) {
    const auto violations = validate_generator(gen_, dim_);
    if (!violations.empty()) {
      std::ostringstream os;
      os << gen_.name() << " is not a valid generator in dimension " << dim_ << ": "
         << violations.front().clause << " clause (order " << violations.front().order
         << ") fails at u=" << violations.front().point;
      throw Error(ErrorKind::InvalidModel, os.str());
    }
  }
}

std::vector<double> CopulaSampler::operator()(RandomStream& rng) const {
  return sample_copula_uniforms(gen_, dim_, rng, route_);
}

}  // namespace osim::copulagen
