#pragma once

#include <string>

#include "vl/parser.hpp"
#include "vl/resource.hpp"
#include "vl/type.hpp"

namespace vl::test {

inline Term P(const std::string& src) { return parse(src); }
inline Term PI(const std::string& src) { return parse(src, {.allow_intermediate = true}); }

inline Resource R(std::initializer_list<std::string_view> names) { return Resource::of(names); }
inline Resource bot() { return Resource::bottom(); }

inline Type Int() { return Type::integer(); }
inline Type Box(Resource r, Type a) { return Type::box(std::move(r), std::move(a)); }
inline Type Fn(Type a, Type b) { return Type::arrow(std::move(a), std::move(b)); }

inline std::string programs_dir() { return VL_PROGRAMS_DIR; }

}  // namespace vl::test
