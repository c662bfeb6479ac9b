#include <doctest.h>

#include <algorithm>
#include <complex>

#include "geostep/polynomial.hpp"
#include "geostep/text_format.hpp"

using geostep::Polynomial;
using geostep::Rational;

namespace {

Polynomial poly(std::initializer_list<Rational> c) { return Polynomial(std::vector<Rational>(c)); }

}  // namespace

TEST_CASE("coefficients are trimmed and evaluated exactly") {
  const auto p = poly({-1, 1, -1, 1, 0, 0});
  CHECK(p.degree() == 3);
  CHECK(p(Rational(1)) == Rational(0));
  CHECK(p(Rational(2)) == Rational(5));
  CHECK(p(Rational(1, 2)) == Rational(-5, 8));
  CHECK(poly({0, 0}).is_zero());
}

TEST_CASE("derivative and reflection") {
  const auto p = poly({-1, 0, 1});
  CHECK(p.derivative() == poly({0, 2}));
  CHECK(poly({0, 1, 1}).reflected(3) == poly({0, 1, 1}));
  CHECK(poly({1, 2}).reflected(3) == poly({0, 0, 2, 1}));
}

TEST_CASE("divmod reconstructs the dividend") {
  const auto a = poly({-1, 1, -1, 1});
  const auto b = poly({1, 0, 1});
  const auto [q, r] = Polynomial::divmod(a, b);
  CHECK(q * b + r == a);
  CHECK(r.degree() < b.degree());
  CHECK(q == poly({-1, 1}));
  CHECK(r.is_zero());
}

TEST_CASE("gcd detects shared roots") {
  // (ξ − 1)(ξ + 1) and ξ + 1
  CHECK(Polynomial::gcd(poly({-1, 0, 1}), poly({1, 1})) == poly({1, 1}));
  // (ξ − 1)(ξ² + 1) and ξ(ξ + 1)/2
  CHECK(Polynomial::gcd(poly({-1, 1, -1, 1}), poly({0, Rational(1, 2), Rational(1, 2)})).degree() == 0);
  CHECK(Polynomial::gcd(Polynomial{}, Polynomial{}).is_zero());
}

TEST_CASE("square-free decomposition separates multiplicities") {
  // (ξ − 1)² (ξ + 2)
  const auto p = poly({-1, 1}) * poly({-1, 1}) * poly({2, 1});
  const auto parts = geostep::square_free_decomposition(p);
  Polynomial rebuilt = poly({1});
  for (const auto& part : parts) {
    for (int i = 0; i < part.multiplicity; ++i) rebuilt = rebuilt * part.factor;
  }
  CHECK(rebuilt == p.monic());
}

TEST_CASE("roots carry exact multiplicities") {
  const auto roots = geostep::roots_with_multiplicity(poly({1, -2, 1}));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].multiplicity == 2);
  CHECK(std::abs(roots[0].value - 1.0) < 1e-12);

  const auto ab4 = geostep::roots_with_multiplicity(poly({0, 0, 0, -1, 1}));
  REQUIRE(ab4.size() == 2);
  int total = 0;
  for (const auto& r : ab4) total += r.multiplicity;
  CHECK(total == 4);
}

TEST_CASE("complex evaluation matches rational evaluation on the real line") {
  const auto p = poly({Rational(3, 2), -2, 0, 1});
  for (int n = -3; n <= 3; ++n) {
    CHECK(std::abs(p(std::complex<double>(n, 0)) - p(Rational(n)).to_double()) < 1e-12);
  }
}

TEST_CASE("document parser keeps keys, continuation rows and line numbers") {
  const auto doc = geostep::parse_document("# comment\nname: x  # trailing\ngamma:\n 1 0\n0 1\n\nk: 1\n");
  REQUIRE(doc.size() == 3);
  CHECK(doc[0].key == "name");
  CHECK(doc[0].value == "x");
  CHECK(doc[1].rows.size() == 2);
  CHECK(doc[2].line == 7);
  CHECK(geostep::split_whitespace("  a\tb  c ") == std::vector<std::string>{"a", "b", "c"});
}
