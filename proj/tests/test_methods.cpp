#include <doctest.h>

#include <random>

#include "geostep/methods.hpp"
#include "geostep/registry.hpp"
#include "oracle.hpp"

using namespace geostep;

namespace {

std::vector<Rational> scaled(const std::vector<oracle::i64>& v, oracle::i64 d) {
  std::vector<Rational> out;
  for (auto x : v) out.emplace_back(x, d);
  return out;
}

MethodSpec lmm(std::vector<Rational> a, std::vector<Rational> b) { return make_method("test", std::move(a), std::move(b)); }

bool has_warning(const MethodSpec& m, std::string_view needle) {
  for (const auto& w : m.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parse_method reads leap-frog") {
  const auto m = parse_method("name: leapfrog\nk: 2\nalpha: -1 0 1\nbeta: 0 2 0\n");
  CHECK(m.name == "leapfrog");
  CHECK(m.k == 2);
  CHECK(m.alpha == std::vector<Rational>{-1, 0, 1});
  CHECK(m.beta == std::vector<Rational>{0, 2, 0});
  CHECK(m.kind == MethodKind::lmm);
  CHECK(m == builtin_method("leapfrog"));
}

TEST_CASE("parse_method rejects an arity mismatch") {
  CHECK_THROWS_AS(parse_method("name: bad\nk: 1\nalpha: -1 1\nbeta: 1/3 1/3 1/3\n"), MethodError);
}

TEST_CASE("parse_method reads the midpoint one-leg method") {
  const auto m = parse_method("name: midpoint\nk: 1\nalpha: -1 1\nbeta: 1/2 1/2\nkind: one-leg\n");
  CHECK(m.kind == MethodKind::one_leg);
  CHECK(characteristic_polynomials(m).sigma(Rational(1)) == Rational(1));
}

TEST_CASE("parse_method validation errors") {
  CHECK_THROWS_AS(parse_method("name: z\nk: 1\nalpha: 1 0\nbeta: 1 0\n"), MethodError);  // alpha_k = 0
  CHECK_THROWS_AS(parse_method("name: z\nk: 1\nalpha: -1 x\nbeta: 1 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_method("name: z\nk: 1\nalpha: -1 1\nbeta: 0 1\nkind: generalized\ngamma:\n1/2 1/3\n0 1\n"),
                  MethodError);
  CHECK_THROWS_AS(parse_method("name: z\nk: 1\nalpha: -1 1\nbeta: 1 1\nkind: one-leg\n"), MethodError);
  CHECK_THROWS_AS(parse_method("name: z\nk: 1\nalpha: -1 1\nbeta: 1 0\nkind: sideways\n"), std::invalid_argument);
}

TEST_CASE("as-printed coefficients parse with a warning, not an error") {
  const auto m = parse_method("name: am\nk: 4\nalpha: 0 0 0 -1 1\nbeta: 0 1/24 -5/24 19/24 9/24\n");
  CHECK(has_warning(m, "alpha_0"));
  CHECK(has_warning(builtin_method("am4"), "alpha_0"));
}

TEST_CASE("method text round-trips") {
  for (const auto& name : registry_names()) {
    if (name == "pc-m2") continue;
    const auto& m = builtin_method(name);
    auto back = parse_method(to_text(m));
    back.warnings = m.warnings;
    CHECK(back == m);
  }
  const auto g = make_method("gen", {-1, 1}, {0, 1}, MethodKind::generalized,
                             RationalMatrix{{Rational(1), Rational(0)}, {Rational(1, 2), Rational(1, 2)}});
  CHECK(parse_method(to_text(g)) == g);
}

TEST_CASE("order certificates against the integer oracle") {
  struct Case {
    const char* name;
    std::vector<oracle::i64> a;
    std::vector<oracle::i64> b;
    oracle::i64 d;
    int order;
  };
  const std::vector<Case> cases = {
      {"ab4", {0, 0, 0, -24, 24}, {-9, 37, -59, 55, 0}, 24, 4},
      {"am4", {0, 0, 0, -24, 24}, {0, 1, -5, 19, 9}, 24, 4},
      {"midpoint", {-2, 2}, {1, 1}, 2, 2},
      {"leapfrog", {-1, 0, 1}, {0, 2, 0}, 1, 2},
      {"explicit-euler", {-1, 1}, {1, 0}, 1, 1},
      {"implicit-euler", {-1, 1}, {0, 1}, 1, 1},
      {"m3-line1", {-1, 1, -1, 1}, {0, 1, 1, 0}, 1, 2},
      {"m1-as-printed", {-2, 2, -2, 2}, {0, 1, 1, 0}, 2, 0},
      {"m3-line2-as-printed", {0, -1, 0, 1}, {0, 2, 2, 0}, 1, 0},
      {"m3b-corrected", {0, -1, 0, 1}, {0, 0, 2, 0}, 1, 2},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto& m = builtin_method(c.name);
    const auto report = analyze(m);
    const auto expected = oracle::defects_scaled(c.a, c.b, 2 * m.k + 4);
    CHECK(report.defects == scaled(expected, c.d));
    CHECK(report.order == c.order);
  }
}

TEST_CASE("worked order examples") {
  const auto m1 = analyze(builtin_method("m1-as-printed"));
  CHECK(m1.defects[1] == Rational(1));
  CHECK_FALSE(m1.consistent);
  CHECK(m1.order == 0);

  const auto m3 = analyze(builtin_method("m3-line1"));
  CHECK(m3.order == 2);
  CHECK(m3.defects[3] == Rational(5));

  CHECK(analyze(builtin_method("m3-line2-as-printed")).defects[1] == Rational(-2));
  CHECK(analyze(builtin_method("explicit-euler")).order == 1);
}

TEST_CASE("characteristic polynomials") {
  const auto m1 = characteristic_polynomials(builtin_method("m1-as-printed"));
  CHECK(m1.rho == Polynomial({-1, 1, -1, 1}));
  CHECK(m1.sigma == Polynomial({0, Rational(1, 2), Rational(1, 2)}));
  const auto mid = characteristic_polynomials(builtin_method("midpoint"));
  CHECK(mid.rho == Polynomial({-1, 1}));
  CHECK(mid.sigma == Polynomial({Rational(1, 2), Rational(1, 2)}));
  const auto lf = characteristic_polynomials(builtin_method("leapfrog"));
  CHECK(lf.rho == Polynomial({-1, 0, 1}));
  CHECK(lf.sigma == Polynomial({0, 2}));
}

TEST_CASE("symmetry") {
  CHECK(is_symmetric(builtin_method("m1-as-printed")));
  CHECK_FALSE(is_symmetric(builtin_method("explicit-euler")));
  CHECK(is_symmetric(builtin_method("leapfrog")));
  CHECK(is_symmetric(builtin_method("midpoint")));
  CHECK_FALSE(is_symmetric(builtin_method("ab4")));
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(builtin_method("m1-as-printed")));
  CHECK_FALSE(is_irreducible(lmm({-1, 0, 1}, {1, 1, 0})));
  CHECK(is_irreducible(builtin_method("midpoint")));
}

TEST_CASE("root condition") {
  const auto m1 = root_condition(builtin_method("m1-as-printed"));
  CHECK(m1.satisfied);
  REQUIRE(m1.roots.size() == 3);
  for (const auto& r : m1.roots) CHECK(std::abs(std::abs(r.value) - 1.0) < 1e-12);

  CHECK_FALSE(root_condition(lmm({1, -2, 1}, {0, 0, 1})).satisfied);

  const auto ab4 = root_condition(builtin_method("ab4"));
  CHECK(ab4.satisfied);
  int zeros = 0;
  int ones = 0;
  for (const auto& r : ab4.roots) {
    if (std::abs(r.value) < 1e-12) zeros += r.multiplicity;
    if (std::abs(r.value - 1.0) < 1e-12) ones += r.multiplicity;
  }
  CHECK(zeros == 3);
  CHECK(ones == 1);
}

TEST_CASE("lambda matrices") {
  CHECK(lambda_matrix(builtin_method("leapfrog")) == RationalMatrix{{0, 2}, {2, 0}});
  CHECK(lambda_matrix(builtin_method("m3-line1")) == RationalMatrix{{0, 1, 1}, {1, -2, 1}, {1, 1, 0}});
  CHECK(lambda_matrix(builtin_method("midpoint")) == RationalMatrix{{1}});

  const auto ab4 = lambda_matrix(builtin_method("ab4"));
  const auto ref = oracle::lambda_scaled({0, 0, 0, -1, 1}, {-9, 37, -59, 55, 0});
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(ab4[i][j] == Rational(ref[i][j], 24));
  }
}

TEST_CASE("report text shows the pinned fields") {
  const auto text = format_report(analyze(builtin_method("leapfrog")));
  CHECK(text.find("order: 2\n") != std::string::npos);
  CHECK(text.find("symmetric: true\n") != std::string::npos);
  CHECK(text.find("lambda: [[0,2],[2,0]]\n") != std::string::npos);
}

// Properties over random and built-in coefficient sets.

namespace {

MethodSpec random_method(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(1, 4);
  std::uniform_int_distribution<std::int64_t> num(-6, 6);
  std::uniform_int_distribution<std::int64_t> den(1, 6);
  const int k = kdist(rng);
  std::vector<Rational> a(k + 1), b(k + 1);
  for (int j = 0; j <= k; ++j) {
    a[j] = Rational(num(rng), den(rng));
    b[j] = Rational(num(rng), den(rng));
  }
  if (a[k].is_zero()) a[k] = Rational(1);
  return make_method("random", a, b);
}

}  // namespace

TEST_CASE("C_0 = rho(1) and C_1 = rho'(1) - sigma(1)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_method(rng);
    const auto [rho, sigma] = characteristic_polynomials(m);
    const auto c = order_defects(m);
    CHECK(c[0] == rho(Rational(1)));
    CHECK(c[1] == rho.derivative()(Rational(1)) - sigma(Rational(1)));
    CHECK(c.size() == static_cast<std::size_t>(2 * m.k + 5));
  }
}

TEST_CASE("lambda is exactly symmetric") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto l = lambda_matrix(random_method(rng));
    for (std::size_t i = 0; i < l.size(); ++i) {
      for (std::size_t j = 0; j < l.size(); ++j) CHECK(l[i][j] == l[j][i]);
    }
  }
}

TEST_CASE("symmetric methods have reflected characteristic polynomials") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> num(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 4;
    std::vector<Rational> a(k + 1), b(k + 1);
    for (int j = 0; j <= k / 2; ++j) {
      a[j] = Rational(num(rng));
      a[k - j] = -a[j];
      b[j] = b[k - j] = Rational(num(rng), 3);
    }
    if (k % 2 == 0) a[k / 2] = Rational(0);
    if (a[k].is_zero()) {
      a[k] = Rational(1);
      a[0] = Rational(-1);
    }
    const auto m = make_method("sym", a, b);
    REQUIRE(is_symmetric(m));
    const auto [rho, sigma] = characteristic_polynomials(m);
    CHECK(rho.reflected(k) == Rational(-1) * rho);
    CHECK(sigma.reflected(k) == sigma);
  }
}

TEST_CASE("order is invariant under rescaling") {
  std::mt19937_64 rng(17);
  for (const auto& name : registry_names()) {
    if (name == "pc-m2") continue;
    const auto& m = builtin_method(name);
    for (const auto& c : {Rational(-1), Rational(3, 7), Rational(5)}) {
      std::vector<Rational> a, b;
      for (const auto& x : m.alpha) a.push_back(c * x);
      for (const auto& x : m.beta) b.push_back(c * x);
      const auto scaled_report = order_analysis(make_method(m.name, a, b));
      const auto base = order_analysis(m);
      CHECK(scaled_report.order == base.order);
      for (std::size_t l = 0; l < base.defects.size(); ++l) CHECK(scaled_report.defects[l] == c * base.defects[l]);
    }
  }
}

TEST_CASE("built-in symmetric consistent methods have even order") {
  for (const auto& name : registry_names()) {
    if (name == "pc-m2") continue;
    const auto r = analyze(builtin_method(name));
    if (r.symmetric && r.consistent) {
      CAPTURE(name);
      CHECK(r.order % 2 == 0);
    }
  }
}

TEST_CASE("registry") {
  CHECK(registry_names() == std::vector<std::string>{"ab4", "am4", "explicit-euler", "implicit-euler", "leapfrog",
                                                     "m1-as-printed", "m1-corrected", "m3-line1",
                                                     "m3-line2-as-printed", "m3b-corrected", "midpoint", "pc-m2"});
  CHECK_THROWS_AS(resolve_scheme("nosuch"), UnknownMethodError);
  CHECK_THROWS_AS(builtin_method("pc-m2"), MethodError);
  CHECK(builtin_method("m1-corrected").beta == std::vector<Rational>{0, 1, 1, 0});
  CHECK(builtin_method("m3b-corrected").beta == std::vector<Rational>{0, 0, 2, 0});
}
