#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osim/copulagen.hpp"
#include "osim/distributions.hpp"
#include "osim/random.hpp"
#include "osim/sample_matrix.hpp"

namespace osim::models {

using copulagen::GeneratorSpec;
using distributions::DistributionSpec;

// DSOS(F_1, ..., F_n; φ). Construction checks the right-endpoint ordering and
// that φ is a bivariate generator; validity in dimension n is recorded in
// copula_valid(). Some builtin generators are not n-monotone, yet the
// W-representation still defines a proper law.
class DsosModel {
 public:
  DsosModel(std::vector<DistributionSpec> dists, GeneratorSpec gen);

  int n() const noexcept { return static_cast<int>(dists_.size()); }
  const std::vector<DistributionSpec>& dists() const noexcept { return dists_; }
  const DistributionSpec& dist(int r) const { return dists_.at(static_cast<std::size_t>(r - 1)); }
  const GeneratorSpec& gen() const noexcept { return gen_; }
  bool copula_valid() const;
  // Step counts n-r+1.
  double count(int r) const noexcept { return static_cast<double>(n() - r + 1); }

 private:
  std::vector<DistributionSpec> dists_;
  GeneratorSpec gen_;
};

// (n, m̃, k) algebra. counts[r-1] is the number of DID components alive at
// step r (n-r+1 unless a preset says otherwise) and gamma_r = counts_r * alpha_r.
struct DgosParams {
  int n = 0;
  double k = 0.0;
  std::vector<double> m;        // m_1..m_{n-1}; empty when built from gamma
  std::vector<double> M;        // M_i = sum_{j>=i} m_j, i = 1..n-1
  std::vector<double> counts;
  std::vector<double> gamma;
  std::vector<double> alpha;
  bool m_plus_one_nonneg = true;
  std::string preset = "custom";
};

// Uses the first n-1 entries of m (longer sequences serve the m̃_{n+1} =
// (m̃_n, m_n) family extension).
DgosParams dgos_params(int n, double k, const std::vector<double>& m);

// From gamma with default counts n-r+1; m_i = gamma_i - gamma_{i+1} - 1.
DgosParams dgos_params_from_gamma(const std::vector<double>& gamma);

// From explicit per-step counts and alphas (gamma_r = counts_r * alpha_r).
DgosParams dgos_params_from_counts(const std::vector<double>& counts, const std::vector<double>& alpha);

class DgosModel {
 public:
  DgosModel(DistributionSpec baseline, DgosParams params, GeneratorSpec gen);

  int n() const noexcept { return params_.n; }
  const DistributionSpec& baseline() const noexcept { return baseline_; }
  const DgosParams& params() const noexcept { return params_; }
  const GeneratorSpec& gen() const noexcept { return gen_; }
  bool copula_valid() const;

  // Step law PHR(F, alpha_r) and its count.
  DistributionSpec step_dist(int r) const;
  double count(int r) const { return params_.counts.at(static_cast<std::size_t>(r - 1)); }

  // Equivalent DSOS (requires default counts).
  DsosModel as_dsos() const;

 private:
  DistributionSpec baseline_;
  DgosParams params_;
  GeneratorSpec gen_;
};

// Preset models. Values by preset:
//   OS:                  {n}
//   OS_nonintegral:      {n, a}                     (a > n-1)
//   SOS_PHR:             {alpha_1..alpha_n}
//   GOS:                 {gamma_1..gamma_n}         (independence only)
//   record:              {n}                        (independence only)
//   k_record:            {n, k}
//   truncation:          {k_1..k_n, alpha_1..alpha_n}
//   progressive_typeII:  {nu, R_1..R_n}             (c_r = nu - r + 1 - sum_{j<r} R_j)
DgosModel dgos_from_preset(std::string_view preset, const std::vector<double>& values,
                           const DistributionSpec& baseline, const GeneratorSpec& gen);
std::vector<std::string> preset_names();

enum class WRoute { Inversion, CopulaMin };

struct WSample {
  int step = 0;
  double count = 0.0;
  double value = 0.0;
};

WSample sample_w(const GeneratorSpec& gen, double count, RandomStream& rng, WRoute route = WRoute::Inversion);

// Level-p quantile of W at `count`: -ln φ(ψ(1-p)/count).
double w_quantile(const GeneratorSpec& gen, double count, double p);

struct Draw {
  std::vector<double> x;
  bool clamped = false;
};

Draw sample_dsos(const DsosModel& model, RandomStream& rng, WRoute route = WRoute::Inversion);
Draw sample_dgos(const DgosModel& model, RandomStream& rng, WRoute route = WRoute::Inversion);

// N draws; draw i uses the stream seeded by derive_seed(seed, i), so results
// do not depend on the thread count.
SampleMatrix sample_dsos_batch(const DsosModel& model, std::size_t draws, std::uint64_t seed,
                               unsigned threads = 0);
SampleMatrix sample_dgos_batch(const DgosModel& model, std::size_t draws, std::uint64_t seed,
                               unsigned threads = 0);

// One-step kernels of the Markov chain: the step law `dist` at `count` DID
// components, given the previous failure at x.
double step_transition_survival(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                                double x, double t);
double step_conditional_quantile(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                                 double x, double p);
double step_conditional_hazard(const GeneratorSpec& gen, const DistributionSpec& dist, double count,
                               double x, double t);
// log of the conditional density of the next failure at t given x.
double step_log_density(const GeneratorSpec& gen, const DistributionSpec& dist, double count, double x,
                        double t);

double dsos_transition_survival(const DsosModel& model, int r, double x, double t);
double dsos_conditional_quantile(const DsosModel& model, int r, double x, double p);
double dsos_conditional_hazard(const DsosModel& model, int r, double x, double t);
double dsos_min_survival(const DsosModel& model, double t);

double dgos_joint_density(const DgosModel& model, const std::vector<double>& x);
double dgos_log_joint_density(const DgosModel& model, const std::vector<double>& x);

// Law of the first failure: φ(n ψ(F̄_1(t))).
DistributionSpec dsos_first_law(const DsosModel& model);

// Marginal laws of X(1), ..., X(n): D^{-1} of partial sums of B_j.
std::vector<DistributionSpec> dgos_marginal_laws(const DgosModel& model,
                                                 const distributions::SumLawOptions& options = {});

}  // namespace osim::models
