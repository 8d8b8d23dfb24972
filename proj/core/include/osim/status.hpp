#pragma once

#include <string_view>

namespace osim {

enum class Status { Holds, Violated, Inconclusive };

constexpr std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Holds: return "HOLDS";
    case Status::Violated: return "VIOLATED";
    case Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

}  // namespace osim
