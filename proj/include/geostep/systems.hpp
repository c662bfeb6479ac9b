#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace geostep {

/// Phase-space point ordered (q_1..q_n, p_1..p_n).
using StateVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Canonical structure matrix J = (0 I_n; -I_n 0) in (q, p) ordering.
Matrix structure_matrix(Eigen::Index dof);

/// Hamiltonian vector field y' = f(y) together with its energy.
///
/// Linear fields additionally expose their system matrix (so implicit
/// relations are solved directly and transfer matrices exist) and an exact
/// flow. Instances are immutable and safe to share between threads.
class GradientField {
 public:
  using VectorMap = std::function<StateVector(const StateVector&)>;
  using EnergyMap = std::function<double(const StateVector&)>;
  using FlowMap = std::function<StateVector(const StateVector&, double)>;

  GradientField(Eigen::Index dof, VectorMap rhs, EnergyMap energy, std::string name = "custom");

  [[nodiscard]] Eigen::Index dof() const noexcept { return dof_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return 2 * dof_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  /// f(y); throws DimensionError on a size mismatch.
  [[nodiscard]] StateVector evaluate(const StateVector& y) const;
  [[nodiscard]] double hamiltonian(const StateVector& y) const;

  [[nodiscard]] bool is_linear() const noexcept { return system_matrix_ != nullptr; }
  /// A with f(y) = A y; null for nonlinear fields.
  [[nodiscard]] const Matrix* system_matrix() const noexcept { return system_matrix_.get(); }
  [[nodiscard]] bool has_exact_flow() const noexcept { return static_cast<bool>(flow_); }
  /// Exact solution at time t from y0; throws std::logic_error when unavailable.
  [[nodiscard]] StateVector exact(const StateVector& y0, double t) const;

 private:
  friend class LinearHamiltonian;
  void check(const StateVector& y) const;

  Eigen::Index dof_;
  VectorMap rhs_;
  EnergyMap energy_;
  std::string name_;
  std::shared_ptr<const Matrix> system_matrix_;
  FlowMap flow_;
};

/// Quadratic Hamiltonian H(y) = yᵀ S y / 2 with system matrix A = J S.
class LinearHamiltonian {
 public:
  /// Throws std::invalid_argument unless S is square, even-sized and
  /// symmetric within 1e-14 (relative to its largest entry).
  explicit LinearHamiltonian(Matrix hessian, std::string name = "quadratic");

  [[nodiscard]] const Matrix& hessian() const noexcept { return s_; }
  [[nodiscard]] const Matrix& system_matrix() const noexcept { return a_; }
  [[nodiscard]] Eigen::Index dof() const noexcept { return s_.rows() / 2; }
  [[nodiscard]] double energy(const StateVector& y) const;
  /// exp(tA) y0, closed form for the oscillator, Padé scaling-and-squaring otherwise.
  [[nodiscard]] StateVector exact(const StateVector& y0, double t) const;
  [[nodiscard]] GradientField field() const;

  /// Oscillator frequency when built by sho().
  [[nodiscard]] std::optional<double> omega() const noexcept { return omega_; }

 private:
  friend LinearHamiltonian sho(double omega);

  Matrix s_;
  Matrix a_;
  std::string name_;
  std::optional<double> omega_;
};

/// H(q, p) = p²/2 + ω² q²/2. Throws std::invalid_argument for ω ≤ 0.
LinearHamiltonian sho(double omega);

/// Closed-form oscillator solution.
StateVector sho_exact(double omega, const StateVector& y0, double t);

/// Mathematical pendulum H = p²/2 − ω² cos q (nonlinear, no exact flow).
GradientField pendulum(double omega);

double hamiltonian_energy(const GradientField& field, const StateVector& y);

/// Reads a symmetric Hessian from text: one row per line, whitespace-separated reals.
LinearHamiltonian load_quadratic(const std::string& text, std::string name = "quadratic");

/// Builds a state from the (p₀, q₀) pair used on the command line; every
/// degree of freedom gets the same values.
StateVector initial_state(Eigen::Index dof, double p0, double q0);

}  // namespace geostep
