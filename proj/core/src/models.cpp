#include "osim/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "osim/error.hpp"

namespace osim::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_bivariate(const GeneratorSpec& gen) {
  const auto v = copulagen::validate_generator(gen, 2);
  if (!v.empty()) {
    std::ostringstream os;
    os << "generator " << gen.name() << " is not decreasing and convex (" << v.front().clause
       << " clause fails at u=" << v.front().point << ")";
    throw Error(ErrorKind::InvalidModel, os.str());
  }
}

void check_gamma(const std::vector<double>& gamma) {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i])) {
      std::ostringstream os;
      os << "gamma_" << (i + 1) << " = " << gamma[i] << " must be > 0";
      throw Error(ErrorKind::InvalidGamma, os.str());
    }
  }
}

bool integral(double c) { return c == std::floor(c); }

// Next failure after x under `count` DID components with law `dist`;
// returns {value, clamped}.
std::pair<double, bool> step_forward(const DistributionSpec& dist, double x, double w) {
  const double end = dist.right_endpoint();
  const double y = w + dist.cum_hazard(x);
  double t = std::isfinite(y) ? dist.inv_cum_hazard(y) : kInf;
  if (!std::isfinite(t) || t >= end) {
    if (std::isfinite(end)) return {end, true};
    throw Error(ErrorKind::CumHazardOverflow, "cumulative hazard " + std::to_string(y) + " beyond range");
  }
  return {std::max(t, x), false};
}

template <class Model, class Sampler>
SampleMatrix batch(const Model& model, std::size_t draws, std::uint64_t seed, unsigned threads,
                   Sampler sampler, const char* tag) {
  const auto n = static_cast<std::size_t>(model.n());
  SampleMatrix out(draws, n);
  out.seed = seed;
  out.tag = tag;
  if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, draws / 256)));
  threads = std::max(1u, threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t i = t; i < draws; i += threads) {
        RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Draw d = sampler(model, rng);
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = d.x[j];
        out.clamped[i] = d.clamped ? 1 : 0;
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

DsosModel::DsosModel(std::vector<DistributionSpec> dists, GeneratorSpec gen)
    : dists_(std::move(dists)), gen_(std::move(gen)) {
  if (dists_.empty()) throw Error(ErrorKind::InvalidModel, "DSOS needs at least one distribution");
  for (std::size_t i = 1; i < dists_.size(); ++i) {
    if (dists_[i].right_endpoint() < dists_[i - 1].right_endpoint()) {
      throw Error(ErrorKind::InvalidModel, "right endpoints must be nondecreasing (F_" +
                                               std::to_string(i + 1) + " ends before F_" + std::to_string(i) + ")");
    }
  }
  require_bivariate(gen_);
}

bool DsosModel::copula_valid() const { return n() < 2 || gen_.valid_in_dimension(n()); }

DgosParams dgos_params(int n, double k, const std::vector<double>& m) {
  if (n < 1) throw Error(ErrorKind::ParamOutOfDomain, "DGOS needs n >= 1");
  if (m.size() + 1 < static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::LengthMismatch, "m needs n-1 = " + std::to_string(n - 1) + " entries, got " +
                                               std::to_string(m.size()));
  }
  DgosParams p;
  p.n = n;
  p.k = k;
  p.m.assign(m.begin(), m.begin() + (n - 1));
  p.M.assign(static_cast<std::size_t>(n - 1), 0.0);
  for (int i = n - 2; i >= 0; --i) {
    p.M[static_cast<std::size_t>(i)] = p.m[static_cast<std::size_t>(i)] + (i + 1 < n - 1 ? p.M[static_cast<std::size_t>(i + 1)] : 0.0);
  }
  p.gamma.resize(static_cast<std::size_t>(n));
  p.counts.resize(static_cast<std::size_t>(n));
  p.alpha.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const auto ix = static_cast<std::size_t>(i - 1);
    p.gamma[ix] = i < n ? k + n - i + p.M[ix] : k;
    p.counts[ix] = static_cast<double>(n - i + 1);
    p.alpha[ix] = p.gamma[ix] / p.counts[ix];
  }
  check_gamma(p.gamma);
  p.m_plus_one_nonneg = std::all_of(p.m.begin(), p.m.end(), [](double v) { return v + 1.0 >= 0.0; });
  p.preset = "dgos";
  return p;
}

DgosParams dgos_params_from_gamma(const std::vector<double>& gamma) {
  if (gamma.empty()) throw Error(ErrorKind::ParamOutOfDomain, "gamma vector is empty");
  check_gamma(gamma);
  const int n = static_cast<int>(gamma.size());
  std::vector<double> m(static_cast<std::size_t>(n - 1));
  for (std::size_t i = 0; i + 1 < gamma.size(); ++i) m[i] = gamma[i] - gamma[i + 1] - 1.0;
  DgosParams p = dgos_params(n, gamma.back(), m);
  // Recompute exactly from the input to avoid summation drift.
  p.gamma = gamma;
  for (std::size_t i = 0; i < gamma.size(); ++i) p.alpha[i] = gamma[i] / p.counts[i];
  p.preset = "gamma";
  return p;
}

DgosParams dgos_params_from_counts(const std::vector<double>& counts, const std::vector<double>& alpha) {
  if (counts.empty() || counts.size() != alpha.size()) {
    throw Error(ErrorKind::LengthMismatch, "counts and alpha must have equal nonzero length");
  }
  DgosParams p;
  p.n = static_cast<int>(counts.size());
  p.counts = counts;
  p.alpha = alpha;
  p.gamma.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(counts[i] > 0.0)) {
      throw Error(ErrorKind::InvalidGamma, "count at step " + std::to_string(i + 1) + " must be > 0");
    }
    if (!(alpha[i] > 0.0)) {
      throw Error(ErrorKind::InvalidGamma, "alpha_" + std::to_string(i + 1) + " must be > 0");
    }
    p.gamma[i] = counts[i] * alpha[i];
  }
  check_gamma(p.gamma);
  p.k = p.gamma.back();
  // With default counts the m-representation is well defined.
  bool default_counts = true;
  for (std::size_t i = 0; i < counts.size(); ++i) default_counts &= counts[i] == static_cast<double>(counts.size() - i);
  if (default_counts) {
    p.m.resize(counts.size() - 1);
    p.M.assign(counts.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) p.m[i] = p.gamma[i] - p.gamma[i + 1] - 1.0;
    for (int i = static_cast<int>(p.m.size()) - 1; i >= 0; --i) {
      const auto ix = static_cast<std::size_t>(i);
      p.M[ix] = p.m[ix] + (ix + 1 < p.m.size() ? p.M[ix + 1] : 0.0);
    }
    p.m_plus_one_nonneg = std::all_of(p.m.begin(), p.m.end(), [](double v) { return v + 1.0 >= 0.0; });
  }
  p.preset = "counts";
  return p;
}

DgosModel::DgosModel(DistributionSpec baseline, DgosParams params, GeneratorSpec gen)
    : baseline_(std::move(baseline)), params_(std::move(params)), gen_(std::move(gen)) {
  if (params_.n < 1 || params_.counts.size() != static_cast<std::size_t>(params_.n) ||
      params_.alpha.size() != params_.counts.size()) {
    throw Error(ErrorKind::InvalidModel, "inconsistent DGOS parameters");
  }
  check_gamma(params_.gamma);
  require_bivariate(gen_);
}

bool DgosModel::copula_valid() const {
  const double c = *std::max_element(params_.counts.begin(), params_.counts.end());
  const int dim = static_cast<int>(std::ceil(c));
  return dim < 2 || gen_.valid_in_dimension(dim);
}

DistributionSpec DgosModel::step_dist(int r) const {
  const double a = params_.alpha.at(static_cast<std::size_t>(r - 1));
  if (a == 1.0) return baseline_;
  return distributions::make_phr(baseline_, a);
}

DsosModel DgosModel::as_dsos() const {
  std::vector<DistributionSpec> dists;
  for (int r = 1; r <= n(); ++r) {
    if (count(r) != static_cast<double>(n() - r + 1)) {
      throw Error(ErrorKind::InvalidModel, "DSOS view needs default step counts n-r+1");
    }
    dists.push_back(step_dist(r));
  }
  return DsosModel(std::move(dists), gen_);
}

std::vector<std::string> preset_names() {
  return {"OS", "OS_nonintegral", "SOS_PHR", "GOS", "record", "k_record", "truncation", "progressive_typeII"};
}

DgosModel dgos_from_preset(std::string_view preset, const std::vector<double>& values,
                           const DistributionSpec& baseline, const GeneratorSpec& gen) {
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::ParamOutOfDomain, std::string(preset) + ": " + what);
  };
  auto as_n = [&](double v) {
    need(v >= 1.0 && integral(v), "n must be a positive integer");
    return static_cast<int>(v);
  };
  DgosParams p;
  if (preset == "OS") {
    need(values.size() == 1, "expects {n}");
    const int n = as_n(values[0]);
    p = dgos_params(n, 1.0, std::vector<double>(static_cast<std::size_t>(n - 1), 0.0));
  } else if (preset == "OS_nonintegral") {
    need(values.size() == 2, "expects {n, a}");
    const int n = as_n(values[0]);
    const double a = values[1];
    need(a > n - 1, "a must exceed n-1");
    std::vector<double> counts;
    for (int r = 1; r <= n; ++r) counts.push_back(a - r + 1);
    p = dgos_params_from_counts(counts, std::vector<double>(static_cast<std::size_t>(n), 1.0));
  } else if (preset == "SOS_PHR") {
    need(!values.empty(), "expects {alpha_1..alpha_n}");
    std::vector<double> counts;
    for (std::size_t r = 0; r < values.size(); ++r) counts.push_back(static_cast<double>(values.size() - r));
    p = dgos_params_from_counts(counts, values);
  } else if (preset == "GOS") {
    if (!gen.is_independence()) {
      throw Error(ErrorKind::PresetNeedsIndependence, "GOS fixes phi(u) = exp(-u); got " + gen.name());
    }
    p = dgos_params_from_gamma(values);
  } else if (preset == "record") {
    if (!gen.is_independence()) {
      throw Error(ErrorKind::PresetNeedsIndependence, "record values have no dependence structure; got " + gen.name());
    }
    need(values.size() == 1, "expects {n}");
    const int n = as_n(values[0]);
    p = dgos_params_from_counts(std::vector<double>(static_cast<std::size_t>(n), 1.0),
                                std::vector<double>(static_cast<std::size_t>(n), 1.0));
  } else if (preset == "k_record") {
    need(values.size() == 2, "expects {n, k}");
    const int n = as_n(values[0]);
    need(values[1] > 0.0, "k must be positive");
    p = dgos_params_from_counts(std::vector<double>(static_cast<std::size_t>(n), values[1]),
                                std::vector<double>(static_cast<std::size_t>(n), 1.0));
  } else if (preset == "truncation") {
    need(!values.empty() && values.size() % 2 == 0, "expects {k_1..k_n, alpha_1..alpha_n}");
    const std::size_t n = values.size() / 2;
    p = dgos_params_from_counts(std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n)),
                                std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(n), values.end()));
  } else if (preset == "progressive_typeII") {
    need(values.size() >= 2, "expects {nu, R_1..R_n}");
    const double nu = values[0];
    std::vector<double> counts;
    double removed = 0.0;
    for (std::size_t r = 1; r < values.size(); ++r) {
      need(values[r] >= 0.0, "censoring numbers must be >= 0");
      counts.push_back(nu - static_cast<double>(r) + 1.0 - removed);
      removed += values[r];
    }
    p = dgos_params_from_counts(counts, std::vector<double>(counts.size(), 1.0));
  } else {
    throw Error(ErrorKind::UnknownPreset, std::string(preset));
  }
  p.preset = std::string(preset);
  return DgosModel(baseline, std::move(p), gen);
}

double w_quantile(const GeneratorSpec& gen, double count, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return kInf;
  return -gen.log_phi(gen.psi_exp(-std::log1p(-p)) / count);
}

WSample sample_w(const GeneratorSpec& gen, double count, RandomStream& rng, WRoute route) {
  if (!(count >= 1.0)) throw Error(ErrorKind::ParamOutOfDomain, "count must be >= 1");
  WSample s;
  s.count = count;
  if (route == WRoute::Inversion) {
    const double v = rng.uniform();
    s.value = -gen.log_phi(gen.psi_exp(-std::log(v)) / count);
    return s;
  }
  if (!integral(count)) throw Error(ErrorKind::ParamOutOfDomain, "copula_min route needs an integer count");
  const int dim = static_cast<int>(count);
  if (dim >= 2 && !gen.valid_in_dimension(dim)) {
    throw Error(ErrorKind::InvalidModel,
                gen.name() + " is not a valid generator in dimension " + std::to_string(dim));
  }
  const auto u = copulagen::sample_copula_uniforms(gen, dim, rng);
  // The survival phi(count psi(e^-t)) is C evaluated at survival levels, so
  // U_j plays the role of exp(-X_j). Using 1 - U_j would give the survival copula.
  double w = kInf;
  for (double v : u) w = std::min(w, -std::log(v));
  s.value = w;
  return s;
}

Draw sample_dsos(const DsosModel& model, RandomStream& rng, WRoute route) {
  Draw d;
  d.x.resize(static_cast<std::size_t>(model.n()));
  double prev = 0.0;
  for (int r = 1; r <= model.n(); ++r) {
    const double w = sample_w(model.gen(), model.count(r), rng, route).value;
    if (d.clamped) {
      d.x[static_cast<std::size_t>(r - 1)] = prev;
      continue;
    }
    const auto [t, clamped] = step_forward(model.dist(r), prev, w);
    d.clamped = d.clamped || clamped;
    d.x[static_cast<std::size_t>(r - 1)] = t;
    prev = t;
  }
  return d;
}

Draw sample_dgos(const DgosModel& model, RandomStream& rng, WRoute route) {
  Draw d;
  d.x.resize(static_cast<std::size_t>(model.n()));
  const auto& F = model.baseline();
  const double end = F.right_endpoint();
  double s = 0.0;
  double prev = 0.0;
  for (int r = 1; r <= model.n(); ++r) {
    const double w = sample_w(model.gen(), model.count(r), rng, route).value;
    s += w / model.params().alpha[static_cast<std::size_t>(r - 1)];
    double t = F.inv_cum_hazard(s);
    if (!std::isfinite(t) || t >= end) {
      if (!std::isfinite(end)) throw Error(ErrorKind::CumHazardOverflow, "cumulative hazard beyond range");
      t = end;
      d.clamped = true;
    }
    t = std::max(t, prev);
    d.x[static_cast<std::size_t>(r - 1)] = t;
    prev = t;
  }
  return d;
}

SampleMatrix sample_dsos_batch(const DsosModel& model, std::size_t draws, std::uint64_t seed, unsigned threads) {
  return batch(model, draws, seed, threads,
               [](const DsosModel& m, RandomStream& rng) { return sample_dsos(m, rng); }, "dsos");
}

SampleMatrix sample_dgos_batch(const DgosModel& model, std::size_t draws, std::uint64_t seed, unsigned threads) {
  return batch(model, draws, seed, threads,
               [](const DgosModel& m, RandomStream& rng) { return sample_dgos(m, rng); }, "dgos");
}

namespace {

double increment(const DistributionSpec& dist, double x, double t) {
  const double dx = dist.cum_hazard(x);
  if (!std::isfinite(dx)) throw Error(ErrorKind::SupportExhausted, "survival is 0 at x");
  if (t <= x) return 0.0;
  return dist.cum_hazard(t) - dx;
}

}  // namespace

double step_transition_survival(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                                double x, double t) {
  const double delta = increment(dist, x, t);
  if (delta <= 0.0) return 1.0;
  if (!std::isfinite(delta)) return 0.0;
  return gen.phi(count * gen.psi_exp(delta));
}

double step_conditional_quantile(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                                 double x, double p) {
  const double dx = dist.cum_hazard(x);
  if (!std::isfinite(dx)) throw Error(ErrorKind::SupportExhausted, "survival is 0 at x");
  if (p <= 0.0) return x;
  const double w = w_quantile(gen, count, p);
  return std::max(x, dist.inv_cum_hazard(dx + w));
}

double step_conditional_hazard(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                               double x, double t) {
  const double delta = increment(dist, x, t);
  if (!std::isfinite(delta)) throw Error(ErrorKind::SupportExhausted, "survival is 0 at t");
  const double z = std::max(gen.psi_exp(delta), 1e-300);
  return dist.hazard(t) * count * gen.rel_derivative(1, count * z) / gen.rel_derivative(1, z);
}

double step_log_density(const GeneratorSpec& gen, const DistributionSpec& dist, double count, double x,
                        double t) {
  const double delta = increment(dist, x, t);
  if (!std::isfinite(delta)) throw Error(ErrorKind::SupportExhausted, "survival is 0 at t");
  const double z = std::max(gen.psi_exp(delta), 1e-300);
  // psi(e^{-delta}) overflows for heavy-tailed generators; the density is 0 there.
  if (!std::isfinite(z)) return -std::numeric_limits<double>::infinity();
  const double log_phi = gen.log_phi(count * z);
  if (log_phi == -std::numeric_limits<double>::infinity()) return log_phi;
  const double ratio = count * gen.rel_derivative(1, count * z) / gen.rel_derivative(1, z);
  return std::log(dist.hazard(t) * ratio) + log_phi;
}

namespace {

void check_step(const DsosModel& model, int r) {
  if (r < 1 || r > model.n()) {
    throw Error(ErrorKind::ParamOutOfDomain, "step r=" + std::to_string(r) + " outside 1.." + std::to_string(model.n()));
  }
}

}  // namespace

double dsos_transition_survival(const DsosModel& model, int r, double x, double t) {
  check_step(model, r);
  return step_transition_survival(model.gen(), model.dist(r), model.count(r), x, t);
}

double dsos_conditional_quantile(const DsosModel& model, int r, double x, double p) {
  check_step(model, r);
  return step_conditional_quantile(model.gen(), model.dist(r), model.count(r), x, p);
}

double dsos_conditional_hazard(const DsosModel& model, int r, double x, double t) {
  check_step(model, r);
  return step_conditional_hazard(model.gen(), model.dist(r), model.count(r), x, t);
}

double dsos_min_survival(const DsosModel& model, double t) {
  if (t <= 0.0) return 1.0;
  const double d = model.dist(1).cum_hazard(t);
  if (!std::isfinite(d)) return 0.0;
  return model.gen().phi(model.n() * model.gen().psi_exp(d));
}

double dgos_log_joint_density(const DgosModel& model, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(model.n())) {
    throw Error(ErrorKind::DimensionMismatch, "joint density needs n coordinates");
  }
  double prev = 0.0;
  double total = 0.0;
  for (int j = 1; j <= model.n(); ++j) {
    const double xj = x[static_cast<std::size_t>(j - 1)];
    if (!(xj > prev)) throw Error(ErrorKind::NotIncreasing, "need 0 = x_0 < x_1 < ... < x_n");
    const auto dist = model.step_dist(j);
    if (!(xj < dist.right_endpoint())) throw Error(ErrorKind::SupportExhausted, "x outside support");
    total += step_log_density(model.gen(), dist, model.count(j), prev, xj);
    prev = xj;
  }
  return total;
}

double dgos_joint_density(const DgosModel& model, const std::vector<double>& x) {
  return std::exp(dgos_log_joint_density(model, x));
}

DistributionSpec dsos_first_law(const DsosModel& model) {
  return distributions::make_transformed(model.dist(1), distributions::make_w_law(model.gen(), model.n(), 1.0));
}

std::vector<DistributionSpec> dgos_marginal_laws(const DgosModel& model,
                                                 const distributions::SumLawOptions& options) {
  std::vector<DistributionSpec> terms;
  for (int r = 1; r <= model.n(); ++r) {
    terms.push_back(distributions::make_w_law(model.gen(), model.count(r),
                                              model.params().alpha[static_cast<std::size_t>(r - 1)]));
  }
  auto sums = distributions::make_partial_sum_laws(terms, options);
  std::vector<DistributionSpec> out;
  for (const auto& s : sums) out.push_back(distributions::make_transformed(model.baseline(), s));
  return out;
}

}  // namespace osim::models
