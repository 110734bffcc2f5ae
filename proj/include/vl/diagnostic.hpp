#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vl/resource.hpp"
#include "vl/term.hpp"

namespace vl {

enum class DiagnosticCode {
  VersionUnavailable,
  LinearityViolation,
  TypeMismatch,
  NotAVersionedValue,
  UnknownVariable,
  EmptyIntersection,
};

inline const char* to_string(DiagnosticCode c) {
  switch (c) {
    case DiagnosticCode::VersionUnavailable: return "VersionUnavailable";
    case DiagnosticCode::LinearityViolation: return "LinearityViolation";
    case DiagnosticCode::TypeMismatch: return "TypeMismatch";
    case DiagnosticCode::NotAVersionedValue: return "NotAVersionedValue";
    case DiagnosticCode::UnknownVariable: return "UnknownVariable";
    case DiagnosticCode::EmptyIntersection: return "EmptyIntersection";
  }
  return "Unknown";
}

struct OffendingVar {
  std::string name;
  Resource available;
};

struct Diagnostic {
  DiagnosticCode code = DiagnosticCode::TypeMismatch;
  std::string message;
  Span span;
  std::optional<Resource> expected_labels;
  std::vector<OffendingVar> offending_vars;

  // `line:col: error[Code]: message`
  std::string render() const {
    return std::to_string(span.line) + ":" + std::to_string(span.col) + ": error[" +
           to_string(code) + "]: " + message;
  }
};

namespace detail {
// "x", "f and x", "a, b and c"
inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += i + 1 == names.size() ? " and " : ", ";
    out += names[i];
  }
  return out;
}
}  // namespace detail

}  // namespace vl
