#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include "recallm/error.hpp"

namespace recallm {

// Value of the global knowledge-update counter t.
using Timestep = std::uint64_t;

// Unordered pair of concept labels, stored with a <= b.
struct EdgeKey {
  std::string a;
  std::string b;

  static EdgeKey make(std::string x, std::string y) {
    if (x == y) throw ArgumentError("self-relation on '" + x + "'");
    if (y < x) std::swap(x, y);
    return EdgeKey{std::move(x), std::move(y)};
  }

  bool touches(const std::string& label) const { return a == label || b == label; }
  const std::string& other(const std::string& label) const { return a == label ? b : a; }

  auto operator<=>(const EdgeKey&) const = default;
  bool operator==(const EdgeKey&) const = default;
};

}  // namespace recallm
