#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osim/random.hpp"
#include "osim/status.hpp"

namespace osim::copulagen {

// Archimedean generator phi with pseudo-inverse psi and derivatives.
//
// Builtin generators carry closed forms for everything, including log(phi),
// psi(e^{-t}) and phi^{(k)}/phi for every k; these avoid underflow when phi
// itself is below the double range. User generators fall back to nested
// central differences (orders <= 4) and bisection for psi.
class GeneratorSpec {
 public:
  struct Definition {
    std::string name;
    std::vector<double> params;
    std::function<double(double)> phi;
    std::function<double(double)> psi;
    std::function<double(double)> phi_d1;
    std::function<double(double)> phi_d2;
    std::function<double(double)> log_phi;
    std::function<double(double)> psi_exp;          // psi(exp(-t))
    std::function<double(int, double)> rel_derivative;  // phi^{(k)}(u) / phi(u)
    std::function<double(double)> log_phi_d2;       // (ln phi)''(u)
    std::function<double(RandomStream&)> frailty;
  };

  explicit GeneratorSpec(Definition def);

  // User-supplied generator; psi, phi_d1 and phi_d2 are optional.
  static GeneratorSpec custom(std::string name, std::function<double(double)> phi,
                              std::function<double(double)> psi = {},
                              std::function<double(double)> phi_d1 = {},
                              std::function<double(double)> phi_d2 = {});

  const std::string& name() const noexcept;
  const std::vector<double>& params() const noexcept;

  double phi(double u) const;
  double psi(double s) const;
  double phi_d1(double u) const;
  double phi_d2(double u) const;
  double log_phi(double u) const;
  double psi_exp(double t) const;
  double derivative(int order, double u) const;
  double rel_derivative(int order, double u) const;
  double log_phi_d2(double u) const;

  bool analytic_derivatives() const noexcept;
  bool has_frailty() const noexcept;
  double sample_frailty(RandomStream& rng) const;

  bool is_independence() const noexcept;

  // Highest derivative order available (analytic: unbounded).
  int max_derivative_order() const noexcept;

  // validate_generator on the default grid, cached per dimension.
  bool valid_in_dimension(int dim) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

GeneratorSpec builtin_generator(std::string_view name, const std::vector<double>& params);

std::vector<std::string> builtin_generator_names();

struct GeneratorDiagnostics {
  double u;
  double H;
  double R;
  double G;
};

GeneratorDiagnostics diagnostics(const GeneratorSpec& gen, double u);

enum class Condition {
  R_RATIO_POS_INC,   // u R'(u)/R(u) positive and increasing
  R_RATIO_INC,       // u R'(u)/R(u) increasing
  H_RATIO_NEG_DEC,   // u H'(u)/H(u) negative and decreasing
  H_RATIO_DEC,       // u H'(u)/H(u) decreasing
  R_DEC,             // R(u) decreasing
  GR_DIFF_POS_INC,   // G(nu)/R(u) - G(u)/R(u) positive and increasing
};

std::string_view to_string(Condition c) noexcept;
Condition parse_condition(std::string_view text);

// Value of the functional that `c` constrains, at u.
double condition_functional(const GeneratorSpec& gen, Condition c, std::optional<int> n, double u);

struct ConditionVerdict {
  Condition condition;
  std::optional<int> n;
  Status status;
  double worst_point;
  double worst_violation;  // <= 0 iff HOLDS
  double tolerance;
  double grid_lo;
  double grid_hi;
  std::size_t grid_size;
  bool finite_difference;
};

inline constexpr double kConditionTolerance = 1e-9;

// 200 log-spaced points on [1e-4, 20].
const std::vector<double>& default_grid();

ConditionVerdict check_generator_condition(const GeneratorSpec& gen, Condition c,
                                           std::optional<int> n,
                                           const std::vector<double>& grid = default_grid());

struct ClauseViolation {
  std::string clause;  // "sign", "nonincreasing", "convex"
  int order;           // derivative order the clause constrains
  double point;        // witnessing grid point (worst)
  double value;        // signed violation magnitude at that point
};

std::vector<ClauseViolation> validate_generator(const GeneratorSpec& gen, int dim,
                                                const std::vector<double>& grid = default_grid());

enum class CopulaRoute { Auto, Frailty, ConditionalInversion };

// One draw (U_1..U_dim) from the Archimedean copula. Precondition: the
// generator is valid in `dim` (checked by CopulaSampler, not here).
std::vector<double> sample_copula_uniforms(const GeneratorSpec& gen, int dim, RandomStream& rng,
                                           CopulaRoute route = CopulaRoute::Auto);

// Validates the generator once, then samples.
class CopulaSampler {
 public:
  CopulaSampler(GeneratorSpec gen, int dim, CopulaRoute route = CopulaRoute::Auto);

  std::vector<double> operator()(RandomStream& rng) const;

  int dim() const noexcept { return dim_; }

 private:
  GeneratorSpec gen_;
  int dim_;
  CopulaRoute route_;
};

}  // namespace osim::copulagen
