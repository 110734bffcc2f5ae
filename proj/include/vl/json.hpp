#pragma once

#include <nlohmann/json.hpp>

#include "vl/diagnostic.hpp"
#include "vl/resource.hpp"

namespace vl {

// ⊥ has no labels, so it serializes as null.
inline nlohmann::json to_json(const Resource& r) {
  if (r.is_bottom()) return nullptr;
  auto out = nlohmann::json::array();
  for (const auto& l : r.labels()) out.push_back(l.name());
  return out;
}

inline nlohmann::json to_json(const Diagnostic& d) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : d.offending_vars) vars.push_back({{"name", v.name}, {"available", to_json(v.available)}});
  return {
      {"code", to_string(d.code)},
      {"message", d.message},
      {"line", d.span.line},
      {"col", d.span.col},
      {"expected_labels", d.expected_labels ? to_json(*d.expected_labels) : nlohmann::json::array()},
      {"vars", vars},
  };
}

}  // namespace vl
