#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geostep/polynomial.hpp"
#include "geostep/rational.hpp"

namespace geostep {

/// Invalid method definition (bad coefficients, arity, normalization).
class MethodError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class MethodKind { lmm, one_leg, generalized };

std::string_view to_string(MethodKind kind);
MethodKind parse_method_kind(std::string_view text);

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Exact coefficient record of a k-step scheme
///
///   Σ α_j y_{n+j} = h Σ β_j f(Σ_l γ_jl y_{n+l}),
///
/// where γ is absent for a plain multistep method (γ = I) and implied as
/// γ_jl = β_l for a one-leg method.
struct MethodSpec {
  std::string name;
  int k = 0;
  std::vector<Rational> alpha;
  std::vector<Rational> beta;
  std::optional<RationalMatrix> gamma;
  MethodKind kind = MethodKind::lmm;
  /// Non-fatal issues, e.g. α_0 = β_0 = 0 or a known consistency defect.
  std::vector<std::string> warnings;

  /// True when y_{n+k} never enters a derivative evaluation.
  [[nodiscard]] bool explicit_method() const;
  /// γ-weighted coefficients seen by a linear field: β_eff,l = Σ_j β_j γ_jl.
  [[nodiscard]] std::vector<Rational> effective_beta() const;
  /// γ as a full matrix (identity for lmm, rows equal to β for one-leg).
  [[nodiscard]] RationalMatrix effective_gamma() const;

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

/// Validating constructor. Throws MethodError on: length mismatch, α_k = 0,
/// γ row sums ≠ 1, one-leg without σ(1) = 1. Records a warning (not an error)
/// when |α_0| + |β_0| = 0.
MethodSpec make_method(std::string name, std::vector<Rational> alpha, std::vector<Rational> beta,
                       MethodKind kind = MethodKind::lmm,
                       std::optional<RationalMatrix> gamma = std::nullopt);

/// Parses the line-based method-definition document.
MethodSpec parse_method(std::string_view text);
/// Inverse of parse_method (warnings are not serialized).
std::string to_text(const MethodSpec& method);

struct PolyPair {
  Polynomial rho;
  Polynomial sigma;
};

PolyPair characteristic_polynomials(const MethodSpec& method);

/// Order-condition defects C_0..C_L, L = 2k + 4.
std::vector<Rational> order_defects(const MethodSpec& method);
bool is_symmetric(const MethodSpec& method);
bool is_irreducible(const MethodSpec& method);

struct RootCondition {
  bool satisfied = false;
  std::vector<Root> roots;
};

/// Zero-stability check on ρ: every root in the closed unit disk (slack
/// 1e-10), roots on the boundary simple and separated by more than 1e-8.
RootCondition root_condition(const MethodSpec& method);

/// λ_ij = Σ_{m≥0} (α_{i+m} β_{j+m} + α_{j+m} β_{i+m}), i, j = 1..k,
/// coefficients with index > k taken as zero.
RationalMatrix lambda_matrix(const MethodSpec& method);

struct AnalysisReport {
  std::string method;
  int k = 0;
  MethodKind kind = MethodKind::lmm;
  int order = 0;
  std::vector<Rational> defects;
  bool consistent = false;
  bool symmetric = false;
  bool irreducible = false;
  bool rootConditionSatisfied = false;
  std::vector<Root> rhoRoots;
  Rational normalization;
  std::optional<RationalMatrix> lambda;
  std::vector<std::string> warnings;
};

/// Fills order, defects and consistency only.
AnalysisReport order_analysis(const MethodSpec& method);
/// Every certificate.
AnalysisReport analyze(const MethodSpec& method);

/// Flat `key: value` rendering, field names as in AnalysisReport.
std::string format_report(const AnalysisReport& report);

}  // namespace geostep
