#pragma once

#include <limits>
#include <string>
#include <vector>

#include "osim/status.hpp"

namespace osim {

// Outcome of an order, aging-class or battery check. HOLDS iff
// max_violation <= tolerance; INCONCLUSIVE is reserved for failed
// pre-checks and estimator-quality gates.
struct OrderVerdict {
  std::string relation;
  std::string direction = "X<=Y";
  Status status = Status::Holds;
  double max_violation = 0.0;
  double tolerance = 0.0;
  double worst_point = std::numeric_limits<double>::quiet_NaN();
  std::string method;  // analytic | empirical | battery | grid
  std::vector<double> grid;
  std::vector<double> values;
  std::string note;
};

// Sets status from max_violation and tolerance (never touches INCONCLUSIVE).
inline void settle(OrderVerdict& v) {
  if (v.status == Status::Inconclusive) return;
  v.status = v.max_violation <= v.tolerance ? Status::Holds : Status::Violated;
}

}  // namespace osim
