#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geostep/integrators.hpp"

namespace geostep {

class UnknownMethodError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Built-in schemes keyed by name: explicit-euler, implicit-euler, midpoint,
/// leapfrog, m1-as-printed, m1-corrected, ab4, am4, pc-m2, m3-line1,
/// m3-line2-as-printed, m3b-corrected.
const std::map<std::string, Scheme>& builtin_registry();

/// Registry names in sorted order.
std::vector<std::string> registry_names();

/// Throws UnknownMethodError.
const Scheme& builtin_scheme(const std::string& name);
/// Throws UnknownMethodError, or MethodError when the entry is not a single method.
const MethodSpec& builtin_method(const std::string& name);

/// Registry name, or a path to a method-definition document.
Scheme resolve_scheme(const std::string& name_or_path);

}  // namespace geostep
