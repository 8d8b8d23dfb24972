#include "osim/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace osim::io {

namespace {

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      // nlohmann's default object type is an ordered std::map.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(e, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

Json to_json(const OrderVerdict& v, bool with_values) {
  Json j;
  j["relation"] = v.relation;
  j["direction"] = v.direction;
  j["status"] = std::string(to_string(v.status));
  j["max_violation"] = num(v.max_violation);
  j["tolerance"] = num(v.tolerance);
  j["worst_point"] = num(v.worst_point);
  j["method"] = v.method;
  j["grid"] = Json::array();
  for (double x : v.grid) j["grid"].push_back(num(x));
  if (with_values) {
    j["values"] = Json::array();
    for (double x : v.values) j["values"].push_back(num(x));
  }
  j["note"] = v.note;
  return j;
}

Json to_json(const copulagen::ConditionVerdict& v) {
  Json j;
  j["condition"] = std::string(copulagen::to_string(v.condition));
  j["status"] = std::string(to_string(v.status));
  j["worst_point"] = num(v.worst_point);
  j["worst_violation"] = num(v.worst_violation);
  return j;
}

}  // namespace osim::io
