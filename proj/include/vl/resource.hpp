#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vl {

// A version label such as `l1` or `v2.0.0`.
class Label {
 public:
  Label() = default;
  explicit Label(std::string name) : name_(std::move(name)) {
    if (!valid(name_)) throw std::invalid_argument("invalid version label '" + name_ + "'");
  }

  const std::string& name() const { return name_; }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

  // letter, then letters / digits / '_' / '.'
  static bool valid(std::string_view s) {
    if (s.empty() || !is_alpha(s.front())) return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
      return is_alpha(c) || (c >= '0' && c <= '9') || c == '_' || c == '.';
    });
  }

 private:
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

  std::string name_;
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) { return os << l.name(); }

/// Element of the version resource semiring: either ⊥ (the semiring zero)
/// or a finite set of labels. The empty set is the semiring one and is a
/// different element from ⊥.
///
/// Label sets are stored sorted and deduplicated, so equality and subset
/// tests are structural.
class Resource {
 public:
  // Labels(∅)
  Resource() = default;

  static Resource bottom() {
    Resource r;
    r.bottom_ = true;
    return r;
  }
  static Resource empty() { return Resource{}; }

  static Resource of(std::vector<Label> labels) {
    Resource r;
    r.labels_ = std::move(labels);
    std::sort(r.labels_.begin(), r.labels_.end());
    r.labels_.erase(std::unique(r.labels_.begin(), r.labels_.end()), r.labels_.end());
    return r;
  }
  static Resource of(std::initializer_list<std::string_view> names) {
    std::vector<Label> ls;
    for (auto n : names) ls.emplace_back(std::string(n));
    return of(std::move(ls));
  }
  static Resource single(const Label& l) { return of(std::vector<Label>{l}); }

  bool is_bottom() const { return bottom_; }
  bool is_labels() const { return !bottom_; }

  // Empty for ⊥.
  const std::vector<Label>& labels() const { return labels_; }

  bool contains(const Label& l) const {
    return !bottom_ && std::binary_search(labels_.begin(), labels_.end(), l);
  }

  friend bool operator==(const Resource&, const Resource&) = default;

  // Total order used only for containers; unrelated to ⊑.
  friend bool operator<(const Resource& a, const Resource& b) {
    if (a.bottom_ != b.bottom_) return a.bottom_;
    return a.labels_ < b.labels_;
  }

  std::string to_string() const {
    if (bottom_) return "bot";
    std::string out = "{";
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (i) out += ",";
      out += labels_[i].name();
    }
    return out + "}";
  }

 private:
  bool bottom_ = false;
  std::vector<Label> labels_;
};

inline std::ostream& operator<<(std::ostream& os, const Resource& r) { return os << r.to_string(); }

namespace detail {
inline std::vector<Label> set_union(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::vector<Label> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
}  // namespace detail

// r1 ⊕ r2: ⊥ is the identity, otherwise union.
inline Resource plus(const Resource& r1, const Resource& r2) {
  if (r2.is_bottom()) return r1;
  if (r1.is_bottom()) return r2;
  return Resource::of(detail::set_union(r1.labels(), r2.labels()));
}

// r1 ⊗ r2: ⊥ absorbs, otherwise union.
inline Resource times(const Resource& r1, const Resource& r2) {
  if (r1.is_bottom() || r2.is_bottom()) return Resource::bottom();
  return Resource::of(detail::set_union(r1.labels(), r2.labels()));
}

// r1 ⊑ r2: ⊥ is below everything; label sets are ordered by inclusion.
// Nothing but ⊥ is below ⊥.
inline bool leq(const Resource& r1, const Resource& r2) {
  if (r1.is_bottom()) return true;
  if (r2.is_bottom()) return false;
  return std::includes(r2.labels().begin(), r2.labels().end(), r1.labels().begin(),
                       r1.labels().end());
}

// Set intersection of two label sets; ⊥ if either side is ⊥.
inline Resource intersect(const Resource& r1, const Resource& r2) {
  if (r1.is_bottom() || r2.is_bottom()) return Resource::bottom();
  std::vector<Label> out;
  std::set_intersection(r1.labels().begin(), r1.labels().end(), r2.labels().begin(),
                        r2.labels().end(), std::back_inserter(out));
  return Resource::of(std::move(out));
}

// ⊥ followed by every subset of `universe`, subsets in binary-counter order.
inline std::vector<Resource> all_resources(const std::vector<Label>& universe) {
  std::vector<Resource> out{Resource::bottom()};
  const std::size_t n = universe.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Label> ls;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) ls.push_back(universe[i]);
    out.push_back(Resource::of(std::move(ls)));
  }
  return out;
}

}  // namespace vl
