#include "geostep/methods.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "geostep/text_format.hpp"

namespace geostep {
namespace {

std::vector<Rational> parse_rationals(std::string_view text) {
  std::vector<Rational> out;
  for (const auto& token : split_whitespace(text)) out.push_back(Rational::parse(token));
  return out;
}

std::string join(const std::vector<Rational>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += values[i].str();
  }
  return out;
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop negative zero
  return fmt::format("{:.12g}", x);
}

std::string format_root(const Root& r) {
  // Snap round-off so that exact roots such as ±i print cleanly.
  double re = std::abs(r.value.real()) < 1e-14 ? 0.0 : r.value.real();
  double im = std::abs(r.value.imag()) < 1e-14 ? 0.0 : r.value.imag();
  std::string s = format_double(re);
  if (im != 0.0) s += (im < 0 ? "-" : "+") + format_double(std::abs(im)) + "i";
  if (r.multiplicity > 1) s += fmt::format("^{}", r.multiplicity);
  return s;
}

}  // namespace

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::lmm: return "lmm";
    case MethodKind::one_leg: return "one-leg";
    case MethodKind::generalized: return "generalized";
  }
  return "lmm";
}

MethodKind parse_method_kind(std::string_view text) {
  if (text == "lmm") return MethodKind::lmm;
  if (text == "one-leg") return MethodKind::one_leg;
  if (text == "generalized") return MethodKind::generalized;
  throw MethodError("unknown method kind '" + std::string(text) + "'");
}

bool MethodSpec::explicit_method() const {
  const auto g = effective_gamma();
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (!beta[j].is_zero() && !g[j].back().is_zero()) return false;
  }
  return true;
}

RationalMatrix MethodSpec::effective_gamma() const {
  const auto n = static_cast<std::size_t>(k) + 1;
  if (gamma) return *gamma;
  RationalMatrix g(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t j = 0; j < n; ++j) {
    if (kind == MethodKind::one_leg) {
      g[j] = beta;
    } else {
      g[j][j] = Rational(1);
    }
  }
  return g;
}

std::vector<Rational> MethodSpec::effective_beta() const {
  const auto g = effective_gamma();
  std::vector<Rational> out(beta.size(), Rational(0));
  for (std::size_t j = 0; j < beta.size(); ++j) {
    for (std::size_t l = 0; l < beta.size(); ++l) out[l] += beta[j] * g[j][l];
  }
  return out;
}

MethodSpec make_method(std::string name, std::vector<Rational> alpha, std::vector<Rational> beta,
                       MethodKind kind, std::optional<RationalMatrix> gamma) {
  if (alpha.size() < 2) throw MethodError("method '" + name + "': need at least two alpha coefficients");
  const std::size_t n = alpha.size();
  if (beta.size() != n) {
    throw MethodError(fmt::format("method '{}': alpha/beta length mismatch ({} vs {})", name, n, beta.size()));
  }
  if (alpha.back().is_zero()) throw MethodError("method '" + name + "': leading coefficient alpha[k] is zero");

  MethodSpec m;
  m.k = static_cast<int>(n) - 1;
  if (gamma) {
    if (gamma->size() != n) {
      throw MethodError(fmt::format("method '{}': gamma needs {} rows, got {}", name, n, gamma->size()));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& row = (*gamma)[j];
      if (row.size() != n) {
        throw MethodError(fmt::format("method '{}': gamma row {} needs {} entries", name, j, n));
      }
      Rational sum(0);
      for (const auto& x : row) sum += x;
      if (sum != Rational(1)) {
        throw MethodError(fmt::format("method '{}': gamma row {} sums to {}, not 1", name, j, sum.str()));
      }
    }
  }
  if (kind == MethodKind::one_leg) {
    Rational s(0);
    for (const auto& b : beta) s += b;
    if (s != Rational(1)) {
      throw MethodError(fmt::format("method '{}': one-leg normalization sigma(1) = {} != 1", name, s.str()));
    }
    if (gamma) {
      for (const auto& row : *gamma) {
        if (row != beta) throw MethodError("method '" + name + "': one-leg gamma rows must equal beta");
      }
      gamma.reset();
    }
  }
  if (kind == MethodKind::generalized && !gamma) {
    throw MethodError("method '" + name + "': generalized kind requires gamma");
  }
  if (alpha.front().is_zero() && beta.front().is_zero()) {
    m.warnings.push_back("|alpha_0| + |beta_0| = 0 (method effectively has fewer steps)");
  }
  m.name = std::move(name);
  m.alpha = std::move(alpha);
  m.beta = std::move(beta);
  m.kind = kind;
  m.gamma = std::move(gamma);
  return m;
}

MethodSpec parse_method(std::string_view text) {
  std::optional<std::string> name;
  std::optional<int> k;
  std::vector<Rational> alpha;
  std::vector<Rational> beta;
  std::optional<RationalMatrix> gamma;
  MethodKind kind = MethodKind::lmm;

  for (const auto& e : parse_document(text)) {
    const auto where = [&] { return fmt::format("line {}: ", e.line); };
    try {
      if (e.key == "name") {
        if (e.value.empty()) throw MethodError(where() + "empty name");
        name = e.value;
      } else if (e.key == "k") {
        char* end = nullptr;
        const long v = std::strtol(e.value.c_str(), &end, 10);
        if (e.value.empty() || *end != '\0' || v < 1) throw MethodError(where() + "k must be a positive integer");
        k = static_cast<int>(v);
      } else if (e.key == "alpha") {
        alpha = parse_rationals(e.value);
      } else if (e.key == "beta") {
        beta = parse_rationals(e.value);
      } else if (e.key == "gamma") {
        RationalMatrix g;
        if (!e.value.empty()) g.push_back(parse_rationals(e.value));
        for (const auto& row : e.rows) g.push_back(parse_rationals(row));
        gamma = std::move(g);
      } else if (e.key == "kind") {
        kind = parse_method_kind(e.value);
      } else {
        throw MethodError(where() + "unknown key '" + e.key + "'");
      }
    } catch (const MethodError&) {
      throw;
    } catch (const std::invalid_argument& err) {
      throw MethodError(where() + err.what());
    }
    if (!e.rows.empty() && e.key != "gamma") throw MethodError(where() + "unexpected continuation rows");
  }
  if (!name) throw MethodError("method document lacks 'name'");
  if (!k) throw MethodError("method document lacks 'k'");
  const auto expected = static_cast<std::size_t>(*k) + 1;
  if (alpha.size() != expected || beta.size() != expected) {
    throw MethodError(fmt::format("method '{}': alpha/beta length must be k+1 = {} (got {} and {})", *name,
                                  expected, alpha.size(), beta.size()));
  }
  return make_method(*name, std::move(alpha), std::move(beta), kind, std::move(gamma));
}

std::string to_text(const MethodSpec& m) {
  std::string out;
  out += "name: " + m.name + "\n";
  out += fmt::format("k: {}\n", m.k);
  out += "alpha: " + join(m.alpha) + "\n";
  out += "beta: " + join(m.beta) + "\n";
  out += "kind: " + std::string(to_string(m.kind)) + "\n";
  if (m.gamma) {
    out += "gamma:\n";
    for (const auto& row : *m.gamma) out += join(row) + "\n";
  }
  return out;
}

PolyPair characteristic_polynomials(const MethodSpec& m) {
  return {Polynomial(m.alpha), Polynomial(m.beta)};
}

std::vector<Rational> order_defects(const MethodSpec& m) {
  const int horizon = 2 * m.k + 4;
  std::vector<Rational> defects;
  defects.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int ell = 0; ell <= horizon; ++ell) {
    Rational c(0);
    for (int j = 0; j <= m.k; ++j) {
      const Rational jr(j);
      c += m.alpha[static_cast<std::size_t>(j)] * jr.pow(static_cast<unsigned>(ell));
      if (ell > 0) {
        c -= Rational(ell) * m.beta[static_cast<std::size_t>(j)] * jr.pow(static_cast<unsigned>(ell - 1));
      }
    }
    defects.push_back(c);
  }
  return defects;
}

bool is_symmetric(const MethodSpec& m) {
  const auto k = static_cast<std::size_t>(m.k);
  for (std::size_t j = 0; j <= k; ++j) {
    if (m.alpha[k - j] != -m.alpha[j] || m.beta[k - j] != m.beta[j]) return false;
  }
  return true;
}

bool is_irreducible(const MethodSpec& m) {
  const auto [rho, sigma] = characteristic_polynomials(m);
  if (sigma.is_zero()) return rho.degree() == 0;
  return Polynomial::gcd(rho, sigma).degree() == 0;
}

RootCondition root_condition(const MethodSpec& m) {
  constexpr double kModulusSlack = 1e-10;
  constexpr double kSeparation = 1e-8;
  RootCondition rc;
  rc.roots = roots_with_multiplicity(Polynomial(m.alpha));
  rc.satisfied = true;
  for (std::size_t i = 0; i < rc.roots.size(); ++i) {
    const double modulus = std::abs(rc.roots[i].value);
    if (modulus > 1.0 + kModulusSlack) rc.satisfied = false;
    if (modulus < 1.0 - kModulusSlack) continue;
    if (rc.roots[i].multiplicity > 1) rc.satisfied = false;
    for (std::size_t j = 0; j < rc.roots.size(); ++j) {
      if (j != i && std::abs(rc.roots[i].value - rc.roots[j].value) <= kSeparation) rc.satisfied = false;
    }
  }
  return rc;
}

RationalMatrix lambda_matrix(const MethodSpec& m) {
  const int k = m.k;
  const auto coef = [&](const std::vector<Rational>& v, int idx) {
    return idx <= k ? v[static_cast<std::size_t>(idx)] : Rational(0);
  };
  RationalMatrix lambda(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k)));
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) {
      Rational sum(0);
      for (int s = 0; i + s <= k || j + s <= k; ++s) {
        sum += coef(m.alpha, i + s) * coef(m.beta, j + s) + coef(m.alpha, j + s) * coef(m.beta, i + s);
      }
      lambda[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = sum;
    }
  }
  return lambda;
}

AnalysisReport order_analysis(const MethodSpec& m) {
  AnalysisReport r;
  r.method = m.name;
  r.k = m.k;
  r.kind = m.kind;
  r.warnings = m.warnings;
  r.defects = order_defects(m);
  r.consistent = r.defects[0].is_zero() && r.defects[1].is_zero();
  r.order = 0;
  if (r.consistent) {
    const int horizon = static_cast<int>(r.defects.size()) - 1;
    int s = 1;
    while (s < horizon && r.defects[static_cast<std::size_t>(s + 1)].is_zero()) ++s;
    r.order = s;
  }
  for (const auto& b : m.beta) r.normalization += b;
  return r;
}

AnalysisReport analyze(const MethodSpec& m) {
  AnalysisReport r = order_analysis(m);
  r.symmetric = is_symmetric(m);
  r.irreducible = is_irreducible(m);
  auto rc = root_condition(m);
  r.rootConditionSatisfied = rc.satisfied;
  r.rhoRoots = std::move(rc.roots);
  r.lambda = lambda_matrix(m);
  if (!r.consistent) {
    r.warnings.push_back(fmt::format("inconsistent: C_0 = {}, C_1 = {}", r.defects[0].str(), r.defects[1].str()));
  }
  return r;
}

std::string format_report(const AnalysisReport& r) {
  std::ostringstream out;
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "method: " << r.method << '\n';
  out << "k: " << r.k << '\n';
  out << "kind: " << to_string(r.kind) << '\n';
  out << "order: " << r.order << '\n';
  out << "defects: " << join(r.defects) << '\n';
  out << "consistent: " << flag(r.consistent) << '\n';
  out << "symmetric: " << flag(r.symmetric) << '\n';
  out << "irreducible: " << flag(r.irreducible) << '\n';
  out << "rootConditionSatisfied: " << flag(r.rootConditionSatisfied) << '\n';
  out << "rhoRoots:";
  for (const auto& root : r.rhoRoots) out << ' ' << format_root(root);
  out << '\n';
  out << "normalization: " << r.normalization.str() << '\n';
  if (r.lambda) {
    out << "lambda: [";
    for (std::size_t i = 0; i < r.lambda->size(); ++i) {
      out << (i ? ",[" : "[");
      for (std::size_t j = 0; j < (*r.lambda)[i].size(); ++j) out << (j ? "," : "") << (*r.lambda)[i][j].str();
      out << ']';
    }
    out << "]\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace geostep
