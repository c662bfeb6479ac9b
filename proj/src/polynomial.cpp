#include "geostep/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace geostep {

Polynomial::Polynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Rational Polynomial::coefficient(std::size_t power) const {
  return power < coeffs_.size() ? coeffs_[power] : Rational(0);
}

Rational Polynomial::leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
  std::complex<double> acc(0.0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->to_double();
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> d;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    d.push_back(Rational(static_cast<std::int64_t>(j)) * coeffs_[j]);
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  return (Rational(1) / leading()) * *this;
}

Polynomial Polynomial::reflected(std::size_t n) const {
  std::vector<Rational> r(n + 1, Rational(0));
  for (std::size_t j = 0; j <= n; ++j) r[n - j] = coefficient(j);
  if (coeffs_.size() > n + 1) throw std::invalid_argument("reflection bound below degree");
  return Polynomial(std::move(r));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a.coefficient(j) + b.coefficient(j);
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + Rational(-1) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(const Rational& s, const Polynomial& p) {
  std::vector<Rational> c = p.coeffs_;
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& dividend,
                                                     const Polynomial& divisor) {
  if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = dividend.coeffs_;
  const int dd = divisor.degree();
  const int qd = dividend.degree() - dd;
  if (qd < 0) return {Polynomial{}, dividend};
  std::vector<Rational> quot(static_cast<std::size_t>(qd) + 1);
  for (int i = qd; i >= 0; --i) {
    const Rational factor = rem[static_cast<std::size_t>(i + dd)] / divisor.leading();
    quot[static_cast<std::size_t>(i)] = factor;
    for (int j = 0; j <= dd; ++j) {
      rem[static_cast<std::size_t>(i + j)] -= factor * divisor.coeffs_[static_cast<std::size_t>(j)];
    }
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial Polynomial::gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

std::vector<SquareFreeFactor> square_free_decomposition(const Polynomial& p) {
  std::vector<SquareFreeFactor> out;
  if (p.degree() < 1) return out;
  const Polynomial dp = p.derivative();
  const Polynomial a0 = Polynomial::gcd(p, dp);
  Polynomial b = Polynomial::divmod(p, a0).first;
  Polynomial c = Polynomial::divmod(dp, a0).first;
  Polynomial d = c - b.derivative();
  for (int i = 1; b.degree() >= 1; ++i) {
    const Polynomial a = Polynomial::gcd(b, d);
    if (a.degree() >= 1) out.push_back({a, i});
    b = Polynomial::divmod(b, a).first;
    c = Polynomial::divmod(d, a).first;
    d = c - b.derivative();
  }
  return out;
}

std::vector<std::complex<double>> companion_roots(const std::vector<std::complex<double>>& coefficients) {
  std::size_t n = coefficients.size();
  while (n > 0 && coefficients[n - 1] == std::complex<double>(0.0)) --n;
  if (n == 0) throw std::invalid_argument("roots of the zero polynomial");
  const std::size_t degree = n - 1;
  if (degree == 0) return {};
  const std::complex<double> lead = coefficients[degree];
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(degree),
                                                      static_cast<Eigen::Index>(degree));
  for (std::size_t i = 1; i < degree; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  for (std::size_t j = 0; j < degree; ++j) {
    companion(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(degree - 1)) =
        -coefficients[j] / lead;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solve failed");
  std::vector<std::complex<double>> roots(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(roots.begin(), roots.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return roots;
}

std::vector<Root> roots_with_multiplicity(const Polynomial& p) {
  std::vector<Root> out;
  for (const auto& f : square_free_decomposition(p)) {
    std::vector<std::complex<double>> c;
    for (const auto& r : f.factor.coefficients()) c.emplace_back(r.to_double());
    for (auto z : companion_roots(c)) out.push_back({z, f.multiplicity});
  }
  std::sort(out.begin(), out.end(), [](const Root& x, const Root& y) {
    const auto a = x.value;
    const auto b = y.value;
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace geostep
