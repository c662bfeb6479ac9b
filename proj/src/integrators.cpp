#include "geostep/integrators.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace geostep {
namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

void check_window(const MethodSpec& m, const GradientField& field, Window window) {
  if (static_cast<int>(window.size()) != m.k) {
    throw std::invalid_argument(
        fmt::format("method '{}' needs a window of {} states, got {}", m.name, m.k, window.size()));
  }
  for (const auto& y : window) {
    if (y.size() != field.dimension()) throw DimensionError("window state dimension does not match the field");
  }
}

bool all_finite(const StateVector& y) { return y.allFinite(); }

/// Floating-point copy of a method's coefficients, prepared once per run.
struct Coefficients {
  explicit Coefficients(const MethodSpec& m)
      : k(static_cast<std::size_t>(m.k)),
        alpha(to_doubles(m.alpha)),
        beta(to_doubles(m.beta)),
        beta_eff(to_doubles(m.effective_beta())) {
    for (const auto& row : m.effective_gamma()) gamma.push_back(to_doubles(row));
  }
  std::size_t k;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> beta_eff;
  std::vector<std::vector<double>> gamma;
};

/// LU of (α_k I − h β_k A), kept while the triple stays the same.
class ImplicitCache {
 public:
  StateVector solve(double lead_alpha, double lead_beta, const Matrix& a, double h, const StateVector& rhs) {
    if (!lu_ || lead_alpha != lead_alpha_ || lead_beta != lead_beta_ || h != h_ || a_ != &a) {
      const Matrix lhs = lead_alpha * Matrix::Identity(a.rows(), a.cols()) - h * lead_beta * a;
      Eigen::FullPivLU<Matrix> lu(lhs);
      const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
      lu.setThreshold(1e-14);
      if (!lu.isInvertible() || std::abs(lu.maxPivot()) < 1e-14 * scale) {
        throw SingularSystemError(
            fmt::format("implicit system (alpha_k I - h beta_k A) is singular at h = {:.17g}: "
                        "alpha_k/(h beta_k) = {:.17g} is an eigenvalue of A",
                        h, lead_alpha / (h * lead_beta)),
            h);
      }
      lu_ = std::move(lu);
      lead_alpha_ = lead_alpha;
      lead_beta_ = lead_beta;
      h_ = h;
      a_ = &a;
    }
    return lu_->solve(rhs);
  }

 private:
  std::optional<Eigen::FullPivLU<Matrix>> lu_;
  double lead_alpha_ = 0.0;
  double lead_beta_ = 0.0;
  double h_ = 0.0;
  const Matrix* a_ = nullptr;
};

// The step kernels below take the window derivatives `derivs` explicitly so
// the integrator can reuse (or, in PEC mode, substitute) stored values.

StateVector lmm_kernel(const Coefficients& c, const GradientField& field, Window states, Window derivs, double h,
                       const SolverConfig& cfg, ImplicitCache& cache) {
  const std::size_t k = c.k;
  StateVector rhs = StateVector::Zero(field.dimension());
  for (std::size_t j = 0; j < k; ++j) {
    if (c.alpha[j] != 0.0) rhs -= c.alpha[j] * states[j];
    if (c.beta[j] != 0.0) rhs += (h * c.beta[j]) * derivs[j];
  }
  if (c.beta[k] == 0.0) return rhs / c.alpha[k];
  if (const Matrix* a = field.system_matrix()) return cache.solve(c.alpha[k], c.beta[k], *a, h, rhs);
  const double ak = c.alpha[k];
  const double hb = h * c.beta[k];
  return fixed_point_solve([&](const StateVector& y) -> StateVector { return (rhs + hb * field.evaluate(y)) / ak; },
                           states[k - 1], cfg);
}

StateVector oneleg_kernel(const Coefficients& c, const GradientField& field, Window states, double h,
                          const SolverConfig& cfg, ImplicitCache& cache) {
  const std::size_t k = c.k;
  StateVector known = StateVector::Zero(field.dimension());
  StateVector argument = StateVector::Zero(field.dimension());
  for (std::size_t j = 0; j < k; ++j) {
    if (c.alpha[j] != 0.0) known -= c.alpha[j] * states[j];
    if (c.beta[j] != 0.0) argument += c.beta[j] * states[j];
  }
  if (c.beta[k] == 0.0) return (known + h * field.evaluate(argument)) / c.alpha[k];
  if (const Matrix* a = field.system_matrix()) {
    return cache.solve(c.alpha[k], c.beta[k], *a, h, known + h * (*a * argument));
  }
  const double ak = c.alpha[k];
  const double bk = c.beta[k];
  return fixed_point_solve(
      [&](const StateVector& y) -> StateVector { return (known + h * field.evaluate(argument + bk * y)) / ak; },
      states[k - 1], cfg);
}

StateVector generalized_kernel(const Coefficients& c, const GradientField& field, Window states, double h,
                               const SolverConfig& cfg, ImplicitCache& cache) {
  const std::size_t k = c.k;
  const auto dim = field.dimension();
  StateVector known = StateVector::Zero(dim);
  for (std::size_t j = 0; j < k; ++j) {
    if (c.alpha[j] != 0.0) known -= c.alpha[j] * states[j];
  }
  if (const Matrix* a = field.system_matrix()) {
    StateVector mix = StateVector::Zero(dim);
    for (std::size_t l = 0; l < k; ++l) {
      if (c.beta_eff[l] != 0.0) mix += c.beta_eff[l] * states[l];
    }
    const StateVector rhs = known + h * (*a * mix);
    if (c.beta_eff[k] == 0.0) return rhs / c.alpha[k];
    return cache.solve(c.alpha[k], c.beta_eff[k], *a, h, rhs);
  }
  // Nonlinear: arguments u_j = Σ_{l<k} γ_jl y_l + γ_jk y. Terms independent of
  // y are evaluated once.
  std::vector<StateVector> partial(k + 1, StateVector::Zero(dim));
  StateVector fixed = known;
  bool implicit = false;
  for (std::size_t j = 0; j <= k; ++j) {
    if (c.beta[j] == 0.0) continue;
    for (std::size_t l = 0; l < k; ++l) {
      if (c.gamma[j][l] != 0.0) partial[j] += c.gamma[j][l] * states[l];
    }
    if (c.gamma[j][k] == 0.0) {
      fixed += (h * c.beta[j]) * field.evaluate(partial[j]);
    } else {
      implicit = true;
    }
  }
  if (!implicit) return fixed / c.alpha[k];
  const double ak = c.alpha[k];
  return fixed_point_solve(
      [&](const StateVector& y) -> StateVector {
        StateVector acc = fixed;
        for (std::size_t j = 0; j <= k; ++j) {
          if (c.beta[j] != 0.0 && c.gamma[j][k] != 0.0) {
            acc += (h * c.beta[j]) * field.evaluate(partial[j] + c.gamma[j][k] * y);
          }
        }
        return acc / ak;
      },
      states[k - 1], cfg);
}

struct PcResult {
  StateVector y;
  StateVector stored_derivative;
};

PcResult pc_kernel(const Coefficients& pred, const Coefficients& corr, PcMode mode, const GradientField& field,
                   Window states, Window derivs, double h) {
  const std::size_t k = pred.k;
  StateVector predicted = StateVector::Zero(field.dimension());
  StateVector corrected = StateVector::Zero(field.dimension());
  for (std::size_t j = 0; j < k; ++j) {
    if (pred.alpha[j] != 0.0) predicted -= pred.alpha[j] * states[j];
    if (pred.beta[j] != 0.0) predicted += (h * pred.beta[j]) * derivs[j];
    if (corr.alpha[j] != 0.0) corrected -= corr.alpha[j] * states[j];
    if (corr.beta[j] != 0.0) corrected += (h * corr.beta[j]) * derivs[j];
  }
  predicted /= pred.alpha[k];
  StateVector f_predicted = field.evaluate(predicted);
  if (corr.beta[k] != 0.0) corrected += (h * corr.beta[k]) * f_predicted;
  corrected /= corr.alpha[k];
  if (mode == PcMode::pec) return {std::move(corrected), std::move(f_predicted)};
  StateVector f_corrected = field.evaluate(corrected);
  return {std::move(corrected), std::move(f_corrected)};
}

StateVector partitioned_kernel(const Coefficients& cq, const Coefficients& cp, const GradientField& field,
                               Window states, Window derivs, double h) {
  const auto n = field.dof();
  const std::size_t k = cq.k;
  StateVector out = StateVector::Zero(2 * n);
  auto q = out.head(n);
  auto p = out.tail(n);
  for (std::size_t j = 0; j < k; ++j) {
    q -= cq.alpha[j] * states[j].head(n);
    q += (h * cq.beta[j]) * derivs[j].head(n);
    p -= cp.alpha[j] * states[j].tail(n);
    p += (h * cp.beta[j]) * derivs[j].tail(n);
  }
  q /= cq.alpha[k];
  p /= cp.alpha[k];
  return out;
}

std::vector<StateVector> derivatives(const GradientField& field, Window states) {
  std::vector<StateVector> out;
  out.reserve(states.size());
  for (const auto& y : states) out.push_back(field.evaluate(y));
  return out;
}

void require_normalized(const MethodSpec& m) {
  Rational s(0);
  for (const auto& b : m.beta) s += b;
  if (s != Rational(1)) {
    throw MethodError(fmt::format("one-leg step needs sigma(1) = 1, method '{}' has {}", m.name, s.str()));
  }
}

void require_explicit(const MethodSpec& m, std::string_view role) {
  if (!m.beta.back().is_zero()) {
    throw MethodError(fmt::format("{} '{}' must be explicit (beta_k = 0)", role, m.name));
  }
}

/// Sliding-window integrator state shared by the public entry points.
class Advancer {
 public:
  Advancer(const Scheme& scheme, const GradientField& field, double h, const SolverConfig& cfg)
      : scheme_(scheme), field_(field), h_(h), cfg_(cfg) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MethodSpec>) {
            first_.emplace(s);
            if (s.kind == MethodKind::one_leg) require_normalized(s);
          } else if constexpr (std::is_same_v<T, PredictorCorrector>) {
            first_.emplace(s.predictor);
            second_.emplace(s.corrector);
          } else {
            first_.emplace(s.q_method);
            second_.emplace(s.p_method);
          }
        },
        scheme_);
  }

  void load(std::vector<StateVector> states) {
    states_ = std::move(states);
    derivs_ = derivatives(field_, states_);
  }

  StateVector advance() {
    StateVector next;
    StateVector stored;
    bool have_stored = false;
    if (const auto* m = std::get_if<MethodSpec>(&scheme_)) {
      switch (m->kind) {
        case MethodKind::lmm: next = lmm_kernel(*first_, field_, states_, derivs_, h_, cfg_, cache_); break;
        case MethodKind::one_leg: next = oneleg_kernel(*first_, field_, states_, h_, cfg_, cache_); break;
        case MethodKind::generalized:
          next = generalized_kernel(*first_, field_, states_, h_, cfg_, cache_);
          break;
      }
    } else if (const auto* pc = std::get_if<PredictorCorrector>(&scheme_)) {
      auto r = pc_kernel(*first_, *second_, pc->mode, field_, states_, derivs_, h_);
      next = std::move(r.y);
      stored = std::move(r.stored_derivative);
      have_stored = true;
    } else {
      next = partitioned_kernel(*first_, *second_, field_, states_, derivs_, h_);
    }
    if (!all_finite(next)) return next;
    if (!have_stored) stored = field_.evaluate(next);
    std::rotate(states_.begin(), states_.begin() + 1, states_.end());
    std::rotate(derivs_.begin(), derivs_.begin() + 1, derivs_.end());
    states_.back() = next;
    derivs_.back() = std::move(stored);
    return next;
  }

 private:
  const Scheme& scheme_;
  const GradientField& field_;
  double h_;
  SolverConfig cfg_;
  std::optional<Coefficients> first_;
  std::optional<Coefficients> second_;
  std::vector<StateVector> states_;
  std::vector<StateVector> derivs_;
  ImplicitCache cache_;
};

}  // namespace

std::string_view to_string(Starter starter) { return starter == Starter::rk4 ? "rk4" : "exact"; }

Starter parse_starter(std::string_view text) {
  if (text == "rk4") return Starter::rk4;
  if (text == "exact") return Starter::exact;
  throw std::invalid_argument("unknown starter '" + std::string(text) + "' (expected rk4|exact)");
}

std::string_view to_string(PcMode mode) { return mode == PcMode::pece ? "pece" : "pec"; }

PcMode parse_pc_mode(std::string_view text) {
  if (text == "pece") return PcMode::pece;
  if (text == "pec") return PcMode::pec;
  throw std::invalid_argument("unknown predictor-corrector mode '" + std::string(text) + "' (expected pece|pec)");
}

MethodSpec pad_method(const MethodSpec& m, int extra) {
  if (extra <= 0) return m;
  std::vector<Rational> alpha(static_cast<std::size_t>(extra), Rational(0));
  std::vector<Rational> beta(static_cast<std::size_t>(extra), Rational(0));
  alpha.insert(alpha.end(), m.alpha.begin(), m.alpha.end());
  beta.insert(beta.end(), m.beta.begin(), m.beta.end());
  std::optional<RationalMatrix> gamma;
  if (m.gamma) {
    const std::size_t n = alpha.size();
    RationalMatrix g(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t j = 0; j < static_cast<std::size_t>(extra); ++j) g[j][j] = Rational(1);
    for (std::size_t j = 0; j < m.gamma->size(); ++j) {
      for (std::size_t l = 0; l < m.gamma->size(); ++l) {
        g[j + static_cast<std::size_t>(extra)][l + static_cast<std::size_t>(extra)] = (*m.gamma)[j][l];
      }
    }
    gamma = std::move(g);
  }
  auto padded = make_method(m.name, std::move(alpha), std::move(beta),
                            m.kind == MethodKind::one_leg ? MethodKind::lmm : m.kind, std::move(gamma));
  if (m.kind == MethodKind::one_leg) {
    // The padded one-leg method keeps its single evaluation at Σ β_j y_j.
    padded = make_method(m.name, padded.alpha, padded.beta, MethodKind::one_leg);
  }
  for (const auto& w : m.warnings) {
    if (std::find(padded.warnings.begin(), padded.warnings.end(), w) == padded.warnings.end()) {
      padded.warnings.push_back(w);
    }
  }
  return padded;
}

PredictorCorrector make_predictor_corrector(std::string name, MethodSpec predictor, MethodSpec corrector,
                                            PcMode mode) {
  require_explicit(predictor, "predictor");
  if (predictor.kind != MethodKind::lmm || corrector.kind != MethodKind::lmm) {
    throw MethodError("predictor-corrector members must be plain multistep methods");
  }
  const int k = std::max(predictor.k, corrector.k);
  return {std::move(name), pad_method(predictor, k - predictor.k), pad_method(corrector, k - corrector.k), mode};
}

PartitionedPair make_partitioned_pair(std::string name, MethodSpec q_method, MethodSpec p_method, bool swap) {
  if (swap) std::swap(q_method, p_method);
  for (const auto* m : {&q_method, &p_method}) {
    if (m->kind != MethodKind::lmm) throw MethodError("partitioned members must be plain multistep methods");
    if (!m->beta.back().is_zero()) {
      throw MethodError("implicit partitioned methods are unsupported ('" + m->name + "' has beta_k != 0)");
    }
  }
  const int k = std::max(q_method.k, p_method.k);
  return {std::move(name), pad_method(q_method, k - q_method.k), pad_method(p_method, k - p_method.k)};
}

int window_length(const Scheme& scheme) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MethodSpec>) return s.k;
        else if constexpr (std::is_same_v<T, PredictorCorrector>) return s.predictor.k;
        else return s.q_method.k;
      },
      scheme);
}

std::string scheme_name(const Scheme& scheme) {
  return std::visit([](const auto& s) { return s.name; }, scheme);
}

StateVector solve_linear_implicit(double lead_alpha, double lead_beta, const Matrix& a, double h,
                                  const StateVector& rhs) {
  if (lead_beta == 0.0) return rhs / lead_alpha;
  ImplicitCache cache;
  return cache.solve(lead_alpha, lead_beta, a, h, rhs);
}

StateVector fixed_point_solve(const std::function<StateVector(const StateVector&)>& phi, StateVector guess,
                              const SolverConfig& cfg) {
  if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1) throw std::invalid_argument("invalid solver config");
  const double theta = cfg.damping;
  double previous = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    StateVector next = phi(guess);
    if (theta != 1.0) next = (1.0 - theta) * guess + theta * next;
    const double update = (next - guess).norm();
    guess = std::move(next);
    if (!std::isfinite(update) || !all_finite(guess)) {
      throw NonConvergenceError(fmt::format("fixed-point iteration produced a non-finite iterate at iteration {}", it),
                                it, update);
    }
    if (update <= cfg.tolerance * (1.0 + guess.norm())) return guess;
    growth = update > previous ? growth + 1 : 0;
    if (growth >= 5) {
      throw NonConvergenceError(
          fmt::format("fixed-point iteration diverges (update {:.3e} growing for 5 iterations)", update), it, update);
    }
    previous = update;
  }
  throw NonConvergenceError(
      fmt::format("fixed-point iteration did not converge in {} iterations (last update {:.3e})", cfg.max_iterations,
                  previous),
      cfg.max_iterations, previous);
}

StateVector lmm_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                     const SolverConfig& cfg) {
  check_window(m, field, window);
  const auto derivs = derivatives(field, window);
  ImplicitCache cache;
  return lmm_kernel(Coefficients(m), field, window, derivs, h, cfg, cache);
}

StateVector oneleg_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                        const SolverConfig& cfg) {
  check_window(m, field, window);
  require_normalized(m);
  ImplicitCache cache;
  return oneleg_kernel(Coefficients(m), field, window, h, cfg, cache);
}

StateVector generalized_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                             const SolverConfig& cfg) {
  check_window(m, field, window);
  ImplicitCache cache;
  return generalized_kernel(Coefficients(m), field, window, h, cfg, cache);
}

StateVector pc_step(const PredictorCorrector& pc, const GradientField& field, Window window, double h) {
  check_window(pc.predictor, field, window);
  const auto derivs = derivatives(field, window);
  return pc_kernel(Coefficients(pc.predictor), Coefficients(pc.corrector), pc.mode, field, window, derivs, h).y;
}

StateVector partitioned_step(const PartitionedPair& pair, const GradientField& field, Window window, double h) {
  check_window(pair.q_method, field, window);
  const auto derivs = derivatives(field, window);
  return partitioned_kernel(Coefficients(pair.q_method), Coefficients(pair.p_method), field, window, derivs, h);
}

StateVector step(const Scheme& scheme, const GradientField& field, Window window, double h,
                 const SolverConfig& cfg) {
  if (const auto* m = std::get_if<MethodSpec>(&scheme)) {
    switch (m->kind) {
      case MethodKind::lmm: return lmm_step(*m, field, window, h, cfg);
      case MethodKind::one_leg: return oneleg_step(*m, field, window, h, cfg);
      case MethodKind::generalized: return generalized_step(*m, field, window, h, cfg);
    }
  }
  if (const auto* pc = std::get_if<PredictorCorrector>(&scheme)) return pc_step(*pc, field, window, h);
  return partitioned_step(std::get<PartitionedPair>(scheme), field, window, h);
}

double relation_residual(const MethodSpec& m, const GradientField& field, Window states, double h) {
  const auto k = static_cast<std::size_t>(m.k);
  if (states.size() != k + 1) throw std::invalid_argument("relation_residual needs k+1 states");
  const Coefficients c(m);
  StateVector r = StateVector::Zero(field.dimension());
  for (std::size_t j = 0; j <= k; ++j) {
    r += c.alpha[j] * states[j];
    if (c.beta[j] == 0.0) continue;
    StateVector arg = StateVector::Zero(field.dimension());
    for (std::size_t l = 0; l <= k; ++l) {
      if (c.gamma[j][l] != 0.0) arg += c.gamma[j][l] * states[l];
    }
    r -= (h * c.beta[j]) * field.evaluate(arg);
  }
  return r.norm();
}

double partitioned_residual(const PartitionedPair& pair, const GradientField& field, Window states, double h) {
  const auto k = static_cast<std::size_t>(pair.q_method.k);
  if (states.size() != k + 1) throw std::invalid_argument("partitioned_residual needs k+1 states");
  const Coefficients cq(pair.q_method);
  const Coefficients cp(pair.p_method);
  const auto n = field.dof();
  StateVector rq = StateVector::Zero(n);
  StateVector rp = StateVector::Zero(n);
  for (std::size_t j = 0; j <= k; ++j) {
    const StateVector f = field.evaluate(states[j]);
    rq += cq.alpha[j] * states[j].head(n) - (h * cq.beta[j]) * f.head(n);
    rp += cp.alpha[j] * states[j].tail(n) - (h * cp.beta[j]) * f.tail(n);
  }
  return std::max(rq.norm(), rp.norm());
}

std::vector<StateVector> rk4_start(const GradientField& field, const StateVector& y0, double h, std::size_t count) {
  std::vector<StateVector> out{y0};
  out.reserve(count + 1);
  for (std::size_t i = 1; i <= count; ++i) {
    const StateVector& y = out.back();
    const StateVector k1 = field.evaluate(y);
    const StateVector k2 = field.evaluate(y + (0.5 * h) * k1);
    const StateVector k3 = field.evaluate(y + (0.5 * h) * k2);
    const StateVector k4 = field.evaluate(y + h * k3);
    StateVector next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(next)) throw IntegrationError(fmt::format("rk4 starter produced a non-finite state at index {}", i), i);
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<StateVector> exact_start(const GradientField& field, const StateVector& y0, double h, std::size_t count) {
  if (!field.is_linear() || !field.has_exact_flow()) {
    throw std::invalid_argument("exact starter requires a linear system with an exact flow (field '" + field.name() +
                                "')");
  }
  std::vector<StateVector> out{y0};
  out.reserve(count + 1);
  for (std::size_t i = 1; i <= count; ++i) out.push_back(field.exact(y0, static_cast<double>(i) * h));
  return out;
}

RunStatus integrate_streaming(const Scheme& scheme, const GradientField& field, const StateVector& y0, double h,
                              std::size_t steps, const SolverConfig& cfg, const Observer& observer) {
  const auto k = static_cast<std::size_t>(window_length(scheme));
  if (steps < k) {
    throw std::invalid_argument(fmt::format("steps ({}) must be at least the window length k = {}", steps, k));
  }
  if (!(std::isfinite(h)) || h == 0.0) throw std::invalid_argument("step size must be finite and nonzero");
  if (y0.size() != field.dimension()) throw DimensionError("initial state dimension does not match the field");

  RunStatus status;
  status.start_count = k;
  std::vector<StateVector> start;
  try {
    start = cfg.starter == Starter::exact ? exact_start(field, y0, h, k - 1) : rk4_start(field, y0, h, k - 1);
  } catch (const IntegrationError& err) {
    // Starter windows are short; nothing is observed when the starter fails.
    status.aborted_at = err.index();
    status.message = err.what();
    return status;
  }
  for (std::size_t i = 0; i < k; ++i) {
    observer(i, static_cast<double>(i) * h, start[i], field.hamiltonian(start[i]));
  }
  status.recorded = k;

  Advancer advancer(scheme, field, h, cfg);
  advancer.load(std::move(start));
  for (std::size_t i = k; i < steps; ++i) {
    StateVector next;
    try {
      next = advancer.advance();
    } catch (const SolverError& err) {
      status.aborted_at = i;
      status.message = err.what();
      return status;
    }
    if (!all_finite(next)) {
      status.aborted_at = i;
      status.message = fmt::format("non-finite state at step {}", i);
      return status;
    }
    observer(i, static_cast<double>(i) * h, next, field.hamiltonian(next));
    status.recorded = i + 1;
  }
  return status;
}

Trajectory integrate(const Scheme& scheme, const GradientField& field, const StateVector& y0, double h,
                     std::size_t steps, const SolverConfig& cfg) {
  Trajectory traj;
  traj.h = h;
  const bool with_errors = field.has_exact_flow();
  traj.states.reserve(steps);
  traj.energies.reserve(steps);
  const auto status = integrate_streaming(scheme, field, y0, h, steps, cfg,
                                          [&](std::size_t, double t, const StateVector& y, double energy) {
                                            traj.states.push_back(y);
                                            traj.energies.push_back(energy);
                                            if (with_errors) traj.errors.push_back((y - field.exact(y0, t)).norm());
                                          });
  traj.start_count = status.start_count;
  if (status.aborted_at) throw IntegrationError(status.message, *status.aborted_at);
  return traj;
}

}  // namespace geostep
