#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "geostep/methods.hpp"
#include "geostep/systems.hpp"

namespace geostep {

enum class Starter { rk4, exact };
enum class PcMode { pece, pec };

std::string_view to_string(Starter starter);
Starter parse_starter(std::string_view text);
std::string_view to_string(PcMode mode);
PcMode parse_pc_mode(std::string_view text);

struct SolverConfig {
  double tolerance = 1e-14;
  int max_iterations = 50;
  Starter starter = Starter::rk4;
  /// Relaxation θ of the fixed-point update y ← (1−θ) y + θ Φ(y).
  double damping = 1.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, int iterations, double last_update)
      : SolverError(what), iterations_(iterations), last_update_(last_update) {}
  [[nodiscard]] int iterations() const noexcept { return iterations_; }
  [[nodiscard]] double last_update() const noexcept { return last_update_; }

 private:
  int iterations_;
  double last_update_;
};

/// (α_k I − h β_k A) is singular: α_k / (h β_k) is an eigenvalue of A.
class SingularSystemError : public SolverError {
 public:
  SingularSystemError(const std::string& what, double h) : SolverError(what), h_(h) {}
  [[nodiscard]] double step_size() const noexcept { return h_; }

 private:
  double h_;
};

/// A step produced a non-finite state; `index` is the grid index that failed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t index) : std::runtime_error(what), index_(index) {}
  [[nodiscard]] std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Explicit predictor paired with a corrector that consumes f(y*) in place
/// of f(y_{n+k}).
struct PredictorCorrector {
  std::string name;
  MethodSpec predictor;
  MethodSpec corrector;
  PcMode mode = PcMode::pece;

  friend bool operator==(const PredictorCorrector&, const PredictorCorrector&) = default;
};

/// Different explicit multistep formulas for the q- and p-equations.
struct PartitionedPair {
  std::string name;
  MethodSpec q_method;
  MethodSpec p_method;

  friend bool operator==(const PartitionedPair&, const PartitionedPair&) = default;
};

/// Pads the shorter method with leading zero coefficients; throws MethodError
/// when the predictor is implicit.
PredictorCorrector make_predictor_corrector(std::string name, MethodSpec predictor, MethodSpec corrector,
                                            PcMode mode = PcMode::pece);
/// Pads to a common k; `swap` exchanges which method drives q. Throws
/// MethodError for implicit members.
PartitionedPair make_partitioned_pair(std::string name, MethodSpec q_method, MethodSpec p_method,
                                      bool swap = false);

/// Returns `m` with `extra` leading zero coefficients (k grows by `extra`).
MethodSpec pad_method(const MethodSpec& m, int extra);

using Scheme = std::variant<MethodSpec, PredictorCorrector, PartitionedPair>;

/// Number of states in the sliding window (k).
int window_length(const Scheme& scheme);
std::string scheme_name(const Scheme& scheme);

using Window = std::span<const StateVector>;

/// Solves (α_k I − h β_k A) y = rhs directly.
StateVector solve_linear_implicit(double lead_alpha, double lead_beta, const Matrix& a, double h,
                                  const StateVector& rhs);
/// Damped fixed-point iteration y = Φ(y); stops when the update norm is at
/// most tolerance·(1 + ‖y‖). Throws NonConvergenceError on divergence,
/// non-finite iterates or when max_iterations is exhausted.
StateVector fixed_point_solve(const std::function<StateVector(const StateVector&)>& phi, StateVector guess,
                              const SolverConfig& cfg);

/// Σ α_j y_{n+j} = h Σ β_j f(y_{n+j}); window holds y_n..y_{n+k−1}.
StateVector lmm_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                     const SolverConfig& cfg = {});
/// Σ α_j y_{n+j} = h f(Σ β_j y_{n+j}); requires σ(1) = 1.
StateVector oneleg_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                        const SolverConfig& cfg = {});
/// Σ α_j y_j = h Σ β_j f(Σ_l γ_jl y_l).
StateVector generalized_step(const MethodSpec& m, const GradientField& field, Window window, double h,
                             const SolverConfig& cfg = {});
/// One predictor-corrector step with derivatives f(y_j) of the window.
StateVector pc_step(const PredictorCorrector& pc, const GradientField& field, Window window, double h);
/// One partitioned step; q rows follow q_method, p rows follow p_method.
StateVector partitioned_step(const PartitionedPair& pair, const GradientField& field, Window window, double h);
/// Dispatches on the scheme (and on MethodSpec::kind).
StateVector step(const Scheme& scheme, const GradientField& field, Window window, double h,
                 const SolverConfig& cfg = {});

/// ‖Σ α_j y_j − h Σ β_j f(Σ_l γ_jl y_l)‖ over k+1 consecutive states; covers
/// plain, one-leg and generalized methods through the effective γ.
double relation_residual(const MethodSpec& m, const GradientField& field, Window states, double h);
/// Max of the q- and p-relation residual norms over k+1 states.
double partitioned_residual(const PartitionedPair& pair, const GradientField& field, Window states, double h);

/// y_0 followed by `count` classical fourth-order Runge–Kutta steps.
std::vector<StateVector> rk4_start(const GradientField& field, const StateVector& y0, double h,
                                   std::size_t count);
/// y_0 followed by the exact flow at h, 2h, …; requires a linear field.
std::vector<StateVector> exact_start(const GradientField& field, const StateVector& y0, double h,
                                     std::size_t count);

struct Trajectory {
  double h = 0.0;
  double t0 = 0.0;
  std::vector<StateVector> states;
  std::vector<double> energies;
  /// ‖y_j − y_exact(t_j)‖, empty when the field has no exact flow.
  std::vector<double> errors;
  std::size_t start_count = 0;

  [[nodiscard]] double time(std::size_t index) const { return t0 + static_cast<double>(index) * h; }
  [[nodiscard]] std::size_t size() const { return states.size(); }
};

using Observer = std::function<void(std::size_t index, double t, const StateVector& y, double energy)>;

struct RunStatus {
  std::size_t recorded = 0;
  std::size_t start_count = 0;
  std::optional<std::size_t> aborted_at;
  std::string message;
};

/// Runs `steps` grid points (y_0..y_{steps−1}, steps ≥ k), the first k from
/// the configured starter. Step failures are reported in the status instead
/// of thrown; everything before the failing index has been observed.
RunStatus integrate_streaming(const Scheme& scheme, const GradientField& field, const StateVector& y0, double h,
                              std::size_t steps, const SolverConfig& cfg, const Observer& observer);

/// Materialized variant; throws IntegrationError (with the failing index) or
/// the underlying SolverError.
Trajectory integrate(const Scheme& scheme, const GradientField& field, const StateVector& y0, double h,
                     std::size_t steps, const SolverConfig& cfg = {});

}  // namespace geostep
