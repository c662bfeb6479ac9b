#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "geostep/rational.hpp"

namespace geostep {

/// Polynomial with exact rational coefficients, stored lowest degree first.
/// The zero polynomial has an empty coefficient vector and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients);

  [[nodiscard]] const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }
  [[nodiscard]] Rational coefficient(std::size_t power) const;
  [[nodiscard]] Rational leading() const;

  [[nodiscard]] Rational operator()(const Rational& x) const;
  [[nodiscard]] std::complex<double> operator()(std::complex<double> x) const;

  [[nodiscard]] Polynomial derivative() const;
  /// Same polynomial scaled to leading coefficient 1 (zero stays zero).
  [[nodiscard]] Polynomial monic() const;
  /// ξ^n p(1/ξ) for n = degree bound `n` (coefficient reversal with padding).
  [[nodiscard]] Polynomial reflected(std::size_t n) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& s, const Polynomial& p);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Euclidean division: returns (quotient, remainder). Divisor must be nonzero.
  [[nodiscard]] static std::pair<Polynomial, Polynomial> divmod(const Polynomial& dividend,
                                                                const Polynomial& divisor);
  /// Monic greatest common divisor; gcd(0, 0) = 0.
  [[nodiscard]] static Polynomial gcd(Polynomial a, Polynomial b);

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// One factor of a square-free decomposition: `factor` is square-free and
/// appears with the given multiplicity.
struct SquareFreeFactor {
  Polynomial factor;
  int multiplicity = 1;
};

/// Yun's square-free factorization over Q. Constant factors are dropped.
std::vector<SquareFreeFactor> square_free_decomposition(const Polynomial& p);

/// A root with its multiplicity.
struct Root {
  std::complex<double> value;
  int multiplicity = 1;
};

/// All complex roots of a polynomial given lowest-degree-first complex
/// coefficients, as eigenvalues of the companion matrix. Leading coefficient
/// must be nonzero after trimming trailing exact zeros.
std::vector<std::complex<double>> companion_roots(const std::vector<std::complex<double>>& coefficients);

/// Roots with exact multiplicities: the square-free parts are solved
/// numerically, the multiplicities come from exact arithmetic.
std::vector<Root> roots_with_multiplicity(const Polynomial& p);

}  // namespace geostep
