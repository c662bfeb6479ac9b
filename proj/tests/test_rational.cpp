#include <doctest.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "geostep/rational.hpp"

using geostep::Rational;

TEST_CASE("construction reduces to lowest terms with a positive denominator") {
  const Rational r(6, -8);
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 4);
  CHECK(Rational(0, -5) == Rational(0));
  CHECK(Rational(0, -5).denominator() == 1);
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("parse accepts integers and p/q with a signed numerator") {
  CHECK(Rational::parse("-9/24") == Rational(-3, 8));
  CHECK(Rational::parse("55/24") == Rational(55, 24));
  CHECK(Rational::parse("+7") == Rational(7));
  CHECK(Rational::parse("0") == Rational(0));
}

TEST_CASE("parse rejects malformed text") {
  for (const char* bad : {"", "1/", "/2", "1.5", "a", "1/0", "1//2", "--1", "1 2", "4/-6"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Rational::parse(bad), std::invalid_argument);
  }
}

TEST_CASE("str round-trips through parse") {
  for (const auto& r : {Rational(-3, 8), Rational(5), Rational(0), Rational(1, 7)}) {
    CHECK(Rational::parse(r.str()) == r);
  }
  CHECK(Rational(-3, 8).str() == "-3/8");
  CHECK(Rational(4).str() == "4");
}

TEST_CASE("field identities hold on random operands") {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
  std::uniform_int_distribution<std::int64_t> den(1, 1000);
  for (int trial = 0; trial < 2000; ++trial) {
    const Rational a(num(rng), den(rng));
    const Rational b(num(rng), den(rng));
    const Rational c(num(rng), den(rng));
    CHECK((a + b) - b == a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
    CHECK(std::gcd(a.numerator(), a.denominator()) == 1);
    CHECK(a.denominator() > 0);
    CHECK((a < b) == (a.to_double() < b.to_double() && !(a == b)));
  }
}

TEST_CASE("pow and abs") {
  CHECK(Rational(-2, 3).pow(3) == Rational(-8, 27));
  CHECK(Rational(5, 7).pow(0) == Rational(1));
  CHECK(Rational(-2, 3).abs() == Rational(2, 3));
}

TEST_CASE("overflow is reported instead of wrapping") {
  const Rational big(std::numeric_limits<std::int64_t>::max() / 2);
  CHECK_THROWS_AS(big * big, geostep::RationalOverflow);
  CHECK_THROWS_AS((void)Rational(2).pow(70), geostep::RationalOverflow);
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS(Rational(1) / Rational(0));
}
