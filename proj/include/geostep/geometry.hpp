#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "geostep/integrators.hpp"
#include "geostep/methods.hpp"
#include "geostep/systems.hpp"

namespace geostep {

/// Linear window map Y_ℓ = (y_ℓ, …, y_{ℓ+k−1}) ↦ Y_{ℓ+1} on a linear system.
/// Top k−1 block rows shift the window, the bottom block row solves the
/// scheme's relation for the new state.
struct TransferMatrix {
  Matrix m;
  int k = 0;
  Eigen::Index dof = 0;
};

/// Throws SingularSystemError when the leading block is singular and
/// std::invalid_argument for PEC-mode predictor-correctors (their stored
/// derivatives are not a function of the state window).
TransferMatrix transfer_matrix(const Scheme& scheme, const LinearHamiltonian& system, double h);

/// Stacks a window into one 2nk vector (and back).
Eigen::VectorXd stack_window(Window window);
std::vector<StateVector> unstack_window(const Eigen::VectorXd& stacked, Eigen::Index dof);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix to_matrix(const RationalMatrix& r);

struct StructureDefectReport {
  /// ‖MᵀKM − K‖_F / ‖K‖_F
  double defect = 0.0;
  /// | |det M| − 1 |
  double area_defect = 0.0;
  std::string structure;
};

/// Defect of M with respect to an arbitrary skew structure K.
StructureDefectReport structure_defect(const Matrix& m, const Matrix& k, std::string description);

/// K = Λ ⊗ J with Λ from lambda_matrix. When Λ vanishes identically (e.g.
/// explicit Euler) the plain K = I_k ⊗ J is used and recorded in `structure`.
StructureDefectReport g_symplecticity_defect(const MethodSpec& method, const LinearHamiltonian& system, double h);

/// Y_ℓᵀ (Λ ⊗ J) Z_ℓ for two windows.
double window_form(const RationalMatrix& lambda, Window y, Window z);

/// | |det M| − 1 | for a matrix.
double area_defect(const Matrix& jacobian);
/// | |det ∂g/∂y| − 1 | with a central finite-difference Jacobian, step
/// 1e-6·(1 + ‖y‖). Throws std::domain_error on non-finite entries.
double area_defect(const std::function<StateVector(const StateVector&)>& map, const StateVector& y);
Matrix numerical_jacobian(const std::function<StateVector(const StateVector&)>& map, const StateVector& y);

struct StepTransitionMatrix {
  Matrix g;
  /// ‖Σ α_j G^j − h Σ β_j A G^j‖_F for multistep methods, ‖M V − V G‖_F with
  /// V = (I; G; …; G^{k−1}) for other schemes.
  double residual = 0.0;
  /// Selected principal root per eigenvalue of A.
  std::vector<std::complex<double>> principal_roots;
  std::vector<std::complex<double>> system_eigenvalues;
};

/// Principal root of ρ(ζ) − z σ(ζ) (effective σ for γ-methods): the root
/// closest to exp(z). Throws std::runtime_error when two roots are within
/// 1e-8 of each other in distance to exp(z).
std::complex<double> principal_root(const MethodSpec& method, std::complex<double> z);

/// Underlying one-step map of a scheme on a linear system. Multistep
/// methods use per-eigenvalue scalar roots in the eigenbasis of A; other
/// schemes use the principal invariant subspace of the transfer matrix.
StepTransitionMatrix step_transition(const Scheme& scheme, const LinearHamiltonian& system, double h);
/// Invariant-subspace route for any scheme (exposed for cross-checks).
StepTransitionMatrix step_transition_subspace(const Scheme& scheme, const LinearHamiltonian& system, double h);

/// Max over windows of ‖Σ α_j ỹ_{n+j} + h Σ β_j f(ỹ_{n+j})‖ on the reversed
/// trajectory ỹ (the relation with h replaced by −h).
double reversibility_residual(const MethodSpec& method, const GradientField& field, const Trajectory& traj);

struct EnergyDrift {
  double max_deviation = 0.0;
  double slope = 0.0;
};

/// Streaming max |H_j − H_0| and least-squares slope of H against t.
class EnergyDriftAccumulator {
 public:
  void add(double t, double energy);
  [[nodiscard]] EnergyDrift result() const;
  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double initial() const noexcept { return h0_; }
  [[nodiscard]] double max_energy() const noexcept { return max_energy_; }

 private:
  std::size_t n_ = 0;
  double h0_ = 0.0;
  double max_dev_ = 0.0;
  double max_energy_ = 0.0;
  double mean_t_ = 0.0;
  double mean_e_ = 0.0;
  double m2_t_ = 0.0;
  double c_te_ = 0.0;
};

EnergyDrift energy_drift(const Trajectory& traj);

}  // namespace geostep
