#pragma once

#include <cstddef>
#include <vector>

namespace osim {

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> linear_spaced(double lo, double hi, std::size_t count);

// Interior points j/(count+1), j = 1..count.
std::vector<double> unit_interior(std::size_t count);

bool strictly_increasing(const std::vector<double>& xs) noexcept;

}  // namespace osim
