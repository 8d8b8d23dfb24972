#pragma once

#include <string>

#include <json.hpp>

#include "osim/copulagen.hpp"
#include "osim/verdict.hpp"

namespace osim::io {

using Json = nlohmann::json;

// %.17g; callers map non-finite values to null.
std::string format_double(double v);

// Sorted keys, doubles with 17 significant digits, NaN/inf as null.
// indent < 0 gives a single line.
std::string canonical_dump(const Json& j, int indent = 2);

Json to_json(const OrderVerdict& v, bool with_values = true);
Json to_json(const copulagen::ConditionVerdict& v);

}  // namespace osim::io
