#pragma once

// Closed forms written out by hand, independent of the library code paths.

#include <cmath>
#include <string>
#include <vector>

namespace oracle {

struct Gen {
  std::string name;
  std::vector<double> params;
};

// phi and psi for each builtin family. Clayton is scaled as (1 + u)^(-1/theta).
inline double phi(const Gen& g, double u) {
  const double th = g.params.empty() ? 0.0 : g.params[0];
  if (g.name == "independence") return std::exp(-u);
  if (g.name == "clayton") return std::pow(1.0 + u, -1.0 / th);
  if (g.name == "gumbel") return std::exp(-std::pow(u, 1.0 / th));
  if (g.name == "ex61") return std::exp((1.0 - std::exp(u)) / th);
  if (g.name == "ex62") return 1.0 - std::pow(1.0 - std::exp(-u), 1.0 / th);
  if (g.name == "ex63") return std::exp(1.0 - std::pow(1.0 + u, 1.0 / th));
  return NAN;
}

inline double psi(const Gen& g, double s) {
  const double th = g.params.empty() ? 0.0 : g.params[0];
  if (g.name == "independence") return -std::log(s);
  if (g.name == "clayton") return std::pow(s, -th) - 1.0;
  if (g.name == "gumbel") return std::pow(-std::log(s), th);
  if (g.name == "ex61") return std::log(1.0 - th * std::log(s));
  if (g.name == "ex62") return -std::log(1.0 - std::pow(1.0 - s, th));
  if (g.name == "ex63") return std::pow(1.0 - std::log(s), th) - 1.0;
  return NAN;
}

// Survival of the minimum of n DID lifetimes with survival sbar.
inline double min_survival(const Gen& g, int n, double sbar) { return phi(g, n * psi(g, sbar)); }

// Functionals stated for the examples of the generator families.
inline double ex61_r_ratio(double u) { return 1.0 + u; }
inline double ex62_h_ratio(double u) { return -(1.0 + std::exp(u) * (u - 1.0)) / (std::exp(u) - 1.0); }
inline double ex63_g_over_r(double theta, double u) { return 1.0 - (1.0 - theta) * std::pow(1.0 + u, -1.0 / theta); }
inline double clayton_r(double theta, double u) { return -u / (theta * (1.0 + u)); }

// Kendall's tau of the Clayton copula.
inline double clayton_tau(double theta) { return theta / (theta + 2.0); }

// Means of the order statistics of n iid Exp(1): sum_{j<=i} 1/(n-j+1).
inline std::vector<double> exp_os_means(int n) {
  std::vector<double> out;
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    acc += 1.0 / (n - i + 1);
    out.push_back(acc);
  }
  return out;
}

// Variances of the same: sum_{j<=i} 1/(n-j+1)^2.
inline std::vector<double> exp_os_variances(int n) {
  std::vector<double> out;
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    acc += 1.0 / ((n - i + 1.0) * (n - i + 1.0));
    out.push_back(acc);
  }
  return out;
}

// Frozen reference values.
inline constexpr double kInvE = 0.36787944117144233;       // e^-1
inline constexpr double kEm2 = 0.1353352832366127;         // e^-2
inline constexpr double kEm3 = 0.049787068367863944;       // e^-3
inline constexpr double kEm5 = 0.006737946999085467;       // e^-5
inline constexpr double kLn2Over3 = 0.23104906018664842;   // ln 2 / 3
inline constexpr double kCondQuant = 1.3465735902799727;   // 1 + ln 2 / 2
inline constexpr double kOsDensity = 0.44626032029685964;  // 2 e^-1.5
inline constexpr double kIndepH1 = -0.5819767068693265;    // -e^-1/(1-e^-1)

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace oracle
