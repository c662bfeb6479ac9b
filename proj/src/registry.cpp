#include "geostep/registry.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace geostep {
namespace {

std::vector<Rational> q(std::initializer_list<Rational> values) { return values; }

std::map<std::string, Scheme> build_registry() {
  std::map<std::string, Scheme> r;
  const auto add = [&](MethodSpec m) {
    auto name = m.name;
    r.emplace(std::move(name), std::move(m));
  };

  add(make_method("explicit-euler", q({-1, 1}), q({1, 0})));
  add(make_method("implicit-euler", q({-1, 1}), q({0, 1})));
  add(make_method("midpoint", q({-1, 1}), q({Rational(1, 2), Rational(1, 2)}), MethodKind::one_leg));
  // y_{n+2} − y_n = 2h f(y_{n+1})
  add(make_method("leapfrog", q({-1, 0, 1}), q({0, 2, 0})));

  auto m1 = make_method("m1-as-printed", q({-1, 1, -1, 1}), q({0, Rational(1, 2), Rational(1, 2), 0}));
  m1.warnings.push_back("as printed the method is inconsistent (C_1 = 1); m1-corrected uses beta = (0 1 1 0)");
  add(m1);
  add(make_method("m1-corrected", q({-1, 1, -1, 1}), q({0, 1, 1, 0})));

  auto ab4 = make_method("ab4", q({0, 0, 0, -1, 1}),
                         q({Rational(-9, 24), Rational(37, 24), Rational(-59, 24), Rational(55, 24), 0}));
  auto am4 = make_method("am4", q({0, 0, 0, -1, 1}),
                         q({0, Rational(1, 24), Rational(-5, 24), Rational(19, 24), Rational(9, 24)}));
  add(ab4);
  add(am4);
  r.emplace("pc-m2", make_predictor_corrector("pc-m2", ab4, am4, PcMode::pece));

  add(make_method("m3-line1", q({-1, 1, -1, 1}), q({0, 1, 1, 0})));
  auto m3b = make_method("m3-line2-as-printed", q({0, -1, 0, 1}), q({0, 2, 2, 0}));
  m3b.warnings.push_back(
      "as printed the method is inconsistent (C_1 = -2); m3b-corrected uses the explicit midpoint form");
  add(m3b);
  add(make_method("m3b-corrected", q({0, -1, 0, 1}), q({0, 0, 2, 0})));
  return r;
}

}  // namespace

const std::map<std::string, Scheme>& builtin_registry() {
  static const std::map<std::string, Scheme> registry = build_registry();
  return registry;
}

std::vector<std::string> registry_names() {
  std::vector<std::string> names;
  for (const auto& [name, scheme] : builtin_registry()) names.push_back(name);
  return names;
}

const Scheme& builtin_scheme(const std::string& name) {
  const auto& r = builtin_registry();
  const auto it = r.find(name);
  if (it == r.end()) throw UnknownMethodError("unknown method '" + name + "'");
  return it->second;
}

const MethodSpec& builtin_method(const std::string& name) {
  const auto& s = builtin_scheme(name);
  if (const auto* m = std::get_if<MethodSpec>(&s)) return *m;
  throw MethodError("'" + name + "' is not a single multistep method");
}

Scheme resolve_scheme(const std::string& name_or_path) {
  const auto& r = builtin_registry();
  if (const auto it = r.find(name_or_path); it != r.end()) return it->second;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(name_or_path, ec)) {
    throw UnknownMethodError("unknown method '" + name_or_path + "' (not a built-in name or a readable file)");
  }
  std::ifstream in(name_or_path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_method(text.str());
}

}  // namespace geostep
