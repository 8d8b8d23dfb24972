#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "osim/copulagen.hpp"
#include "osim/verdict.hpp"

namespace osim::distributions {

// Lifetime law on [0, inf). Implementations supply the cumulative hazard
// D, its inverse and the hazard; the remaining fields default to the
// identities F̄ = exp(-D), f = r F̄, F^{-1}(p) = D^{-1}(-ln(1-p)).
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual double cum_hazard(double x) const = 0;
  virtual double inv_cum_hazard(double y) const = 0;
  virtual double hazard(double x) const = 0;

  virtual double survival(double x) const;
  virtual double cdf(double x) const;
  virtual double density(double x) const;
  virtual double log_density(double x) const;
  virtual double quantile(double p) const;
  virtual double reversed_hazard(double x) const;
  // d/dx ln f(x); default is a central difference of log_density.
  virtual double dlog_density(double x) const;
  virtual double right_endpoint() const;

  // Relative accuracy estimate of the numeric fields (closed forms: 0).
  virtual double tolerance_hint() const { return 0.0; }
  virtual std::string describe() const = 0;
};

class DistributionSpec {
 public:
  DistributionSpec() = default;
  explicit DistributionSpec(std::shared_ptr<const Distribution> impl);

  double survival(double x) const { return impl_->survival(x); }
  double cdf(double x) const { return impl_->cdf(x); }
  double density(double x) const { return impl_->density(x); }
  double log_density(double x) const { return impl_->log_density(x); }
  double quantile(double p) const { return impl_->quantile(p); }
  double hazard(double x) const { return impl_->hazard(x); }
  double reversed_hazard(double x) const { return impl_->reversed_hazard(x); }
  double cum_hazard(double x) const { return impl_->cum_hazard(x); }
  double inv_cum_hazard(double y) const { return impl_->inv_cum_hazard(y); }
  double dlog_density(double x) const { return impl_->dlog_density(x); }
  double right_endpoint() const { return impl_->right_endpoint(); }
  double tolerance_hint() const { return impl_->tolerance_hint(); }
  std::string describe() const { return impl_->describe(); }

  const Distribution& impl() const { return *impl_; }
  const std::shared_ptr<const Distribution>& shared() const { return impl_; }
  explicit operator bool() const noexcept { return static_cast<bool>(impl_); }

 private:
  std::shared_ptr<const Distribution> impl_;
};

// exponential(rate), weibull(shape, scale), lomax(shape, scale), gamma(shape, rate).
DistributionSpec builtin_distribution(std::string_view name, const std::vector<double>& params);
std::vector<std::string> builtin_distribution_names();

// F̄_alpha = F̄^alpha.
DistributionSpec make_phr(const DistributionSpec& baseline, double alpha);

// Law of W = -ln φ(ψ(V)/count) / alpha, i.e. survival φ(count ψ(e^{-alpha t})).
// alpha = 1 gives the step variable W of the DSOS construction; general
// alpha gives B = W/alpha of the DGOS construction.
DistributionSpec make_w_law(const copulagen::GeneratorSpec& gen, double count, double alpha = 1.0);

// Law of D_F^{-1}(S) for a nonnegative S.
DistributionSpec make_transformed(const DistributionSpec& outer, const DistributionSpec& inner);

// Numeric law of a sum of independent nonnegative terms with smooth densities
// on (0, inf). Tabulated by trapezoid convolution at steps h, 2h, 4h with
// Richardson extrapolation; evaluations between nodes use cubic splines and
// tolerance_hint() reports the disagreement with the half-resolution table.
struct SumLawOptions {
  std::size_t nodes = 8192;         // finest-grid intervals
  double tail_probability = 1e-12;  // truncation of the total
};

DistributionSpec make_sum_law(const std::vector<DistributionSpec>& terms,
                              const SumLawOptions& options = {});

// All partial sums S_1, ..., S_n of the given terms, sharing convolutions.
std::vector<DistributionSpec> make_partial_sum_laws(const std::vector<DistributionSpec>& terms,
                                                    const SumLawOptions& options = {});

enum class AgingClass { ILR, DLR, IFR, DFR, DRFR };

std::string_view to_string(AgingClass c) noexcept;
AgingClass parse_aging_class(std::string_view text);

inline constexpr double kAgingTolerance = 1e-9;

// Default aging grid: 200 points, log-spaced between quantile(1e-4) and quantile(0.999).
std::vector<double> default_aging_grid(const DistributionSpec& dist);

OrderVerdict check_aging_class(const DistributionSpec& dist, AgingClass cls,
                               const std::vector<double>& grid);
OrderVerdict check_aging_class(const DistributionSpec& dist, AgingClass cls);

}  // namespace osim::distributions
