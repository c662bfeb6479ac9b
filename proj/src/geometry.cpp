#include "geostep/geometry.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace geostep {
namespace {

using ComplexMatrix = Eigen::MatrixXcd;

constexpr double kAmbiguity = 1e-8;
constexpr double kMaxCondition = 1e8;

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

double condition_number(const ComplexMatrix& v) {
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

Matrix realify(const ComplexMatrix& g) {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (g.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::runtime_error("step-transition matrix has a non-negligible imaginary part");
  }
  return g.real();
}

/// Bottom block row of the transfer matrix: y_k = Σ_j blocks[j] y_j.
std::vector<Matrix> bottom_blocks(const Scheme& scheme, const Matrix& a, double h) {
  const auto dim = a.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  std::vector<Matrix> blocks;

  const auto lead_inverse = [&](double lead_alpha, double lead_beta) {
    const Matrix lhs = lead_alpha * id - h * lead_beta * a;
    Eigen::FullPivLU<Matrix> lu(lhs);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) {
      throw SingularSystemError(
          fmt::format("leading block (alpha_k I - h beta_k A) is singular at h = {:.17g}", h), h);
    }
    return Matrix(lu.inverse());
  };

  if (const auto* m = std::get_if<MethodSpec>(&scheme)) {
    const auto alpha = to_doubles(m->alpha);
    const auto beta = to_doubles(m->effective_beta());
    const auto k = static_cast<std::size_t>(m->k);
    const Matrix inv = lead_inverse(alpha[k], beta[k]);
    for (std::size_t j = 0; j < k; ++j) blocks.push_back(inv * (-alpha[j] * id + h * beta[j] * a));
    return blocks;
  }
  if (const auto* pc = std::get_if<PredictorCorrector>(&scheme)) {
    if (pc->mode == PcMode::pec) {
      throw std::invalid_argument("transfer matrix is defined for PECE mode only (PEC stores predicted derivatives)");
    }
    const auto ap = to_doubles(pc->predictor.alpha);
    const auto bp = to_doubles(pc->predictor.beta);
    const auto ac = to_doubles(pc->corrector.alpha);
    const auto bc = to_doubles(pc->corrector.beta);
    const auto k = static_cast<std::size_t>(pc->predictor.k);
    for (std::size_t j = 0; j < k; ++j) {
      const Matrix predicted = (-ap[j] * id + h * bp[j] * a) / ap[k];
      blocks.push_back((-ac[j] * id + h * bc[j] * a + h * bc[k] * a * predicted) / ac[k]);
    }
    return blocks;
  }
  const auto& pair = std::get<PartitionedPair>(scheme);
  const auto aq = to_doubles(pair.q_method.alpha);
  const auto bq = to_doubles(pair.q_method.beta);
  const auto ap = to_doubles(pair.p_method.alpha);
  const auto bp = to_doubles(pair.p_method.beta);
  const auto k = static_cast<std::size_t>(pair.q_method.k);
  const auto n = dim / 2;
  for (std::size_t j = 0; j < k; ++j) {
    Matrix b(dim, dim);
    b.topRows(n) = (-aq[j] * id.topRows(n) + h * bq[j] * a.topRows(n)) / aq[k];
    b.bottomRows(n) = (-ap[j] * id.bottomRows(n) + h * bp[j] * a.bottomRows(n)) / ap[k];
    blocks.push_back(std::move(b));
  }
  return blocks;
}

/// Eigenvalues of A with the eigenvector matrix; rejects ill-conditioned bases.
std::pair<Eigen::VectorXcd, ComplexMatrix> system_eigen(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition of A failed");
  ComplexMatrix v = solver.eigenvectors();
  if (condition_number(v) >= kMaxCondition) {
    throw std::runtime_error("eigenbasis of A is ill-conditioned (condition number >= 1e8)");
  }
  return {solver.eigenvalues(), v};
}

/// Indices of `candidates` assigned to each entry of `targets`, greedy by
/// distance with clusters of equal targets taking that many candidates.
std::vector<std::size_t> select_principal(const std::vector<std::complex<double>>& candidates,
                                          const std::vector<std::complex<double>>& targets) {
  std::vector<std::size_t> chosen(targets.size(), 0);
  std::vector<bool> used(candidates.size(), false);
  std::vector<bool> done(targets.size(), false);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> cluster;
    for (std::size_t j = i; j < targets.size(); ++j) {
      if (!done[j] && std::abs(targets[j] - targets[i]) <= 1e-10 * (1.0 + std::abs(targets[i]))) cluster.push_back(j);
    }
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!used[c]) order.push_back(c);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(candidates[x] - targets[i]) < std::abs(candidates[y] - targets[i]);
    });
    if (order.size() < cluster.size()) throw std::runtime_error("not enough roots for principal selection");
    if (order.size() > cluster.size()) {
      const double last = std::abs(candidates[order[cluster.size() - 1]] - targets[i]);
      const double next = std::abs(candidates[order[cluster.size()]] - targets[i]);
      if (next - last <= kAmbiguity) {
        throw std::runtime_error(fmt::format(
            "principal root ambiguity: two roots equally close to exp(h lambda) = {:.6g}{:+.6g}i",
            targets[i].real(), targets[i].imag()));
      }
    }
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      chosen[cluster[c]] = order[c];
      used[order[c]] = true;
      done[cluster[c]] = true;
    }
  }
  return chosen;
}

double subspace_residual(const Matrix& m, const Matrix& g, int k) {
  const auto dim = g.rows();
  Matrix v(dim * k, dim);
  Matrix power = Matrix::Identity(dim, dim);
  for (int j = 0; j < k; ++j) {
    v.middleRows(j * dim, dim) = power;
    power = power * g;
  }
  return (m * v - v * g).norm();
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Matrix to_matrix(const RationalMatrix& r) {
  const auto n = static_cast<Eigen::Index>(r.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].to_double();
  }
  return out;
}

Eigen::VectorXd stack_window(Window window) {
  if (window.empty()) return {};
  const auto dim = window.front().size();
  Eigen::VectorXd out(dim * static_cast<Eigen::Index>(window.size()));
  for (std::size_t j = 0; j < window.size(); ++j) out.segment(static_cast<Eigen::Index>(j) * dim, dim) = window[j];
  return out;
}

std::vector<StateVector> unstack_window(const Eigen::VectorXd& stacked, Eigen::Index dof) {
  const auto dim = 2 * dof;
  std::vector<StateVector> out;
  for (Eigen::Index j = 0; j + dim <= stacked.size(); j += dim) out.emplace_back(stacked.segment(j, dim));
  return out;
}

TransferMatrix transfer_matrix(const Scheme& scheme, const LinearHamiltonian& system, double h) {
  const Matrix& a = system.system_matrix();
  const auto dim = a.rows();
  const int k = window_length(scheme);
  const auto blocks = bottom_blocks(scheme, a, h);
  TransferMatrix t;
  t.k = k;
  t.dof = system.dof();
  t.m = Matrix::Zero(dim * k, dim * k);
  for (int i = 0; i + 1 < k; ++i) t.m.block(i * dim, (i + 1) * dim, dim, dim).setIdentity();
  for (int j = 0; j < k; ++j) t.m.block((k - 1) * dim, j * dim, dim, dim) = blocks[static_cast<std::size_t>(j)];
  return t;
}

StructureDefectReport structure_defect(const Matrix& m, const Matrix& k, std::string description) {
  StructureDefectReport r;
  const double norm_k = k.norm();
  if (norm_k == 0.0) throw std::invalid_argument("structure matrix is zero");
  r.defect = (m.transpose() * k * m - k).norm() / norm_k;
  r.area_defect = area_defect(m);
  r.structure = std::move(description);
  return r;
}

StructureDefectReport g_symplecticity_defect(const MethodSpec& method, const LinearHamiltonian& system, double h) {
  const auto t = transfer_matrix(method, system, h);
  const Matrix j = structure_matrix(system.dof());
  const Matrix lambda = to_matrix(lambda_matrix(method));
  if (lambda.cwiseAbs().maxCoeff() == 0.0) {
    return structure_defect(t.m, kron(Matrix::Identity(method.k, method.k), j), "I_k (x) J (Lambda vanishes)");
  }
  return structure_defect(t.m, kron(lambda, j), "Lambda (x) J");
}

double window_form(const RationalMatrix& lambda, Window y, Window z) {
  const Matrix l = to_matrix(lambda);
  const Matrix j = structure_matrix(y.front().size() / 2);
  double acc = 0.0;
  for (Eigen::Index a = 0; a < l.rows(); ++a) {
    for (Eigen::Index b = 0; b < l.cols(); ++b) {
      if (l(a, b) != 0.0) acc += l(a, b) * y[static_cast<std::size_t>(a)].dot(j * z[static_cast<std::size_t>(b)]);
    }
  }
  return acc;
}

double area_defect(const Matrix& jacobian) { return std::abs(std::abs(jacobian.determinant()) - 1.0); }

Matrix numerical_jacobian(const std::function<StateVector(const StateVector&)>& map, const StateVector& y) {
  const double step = 1e-6 * (1.0 + y.norm());
  const StateVector f0 = map(y);
  Matrix jac(f0.size(), y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    StateVector plus = y;
    StateVector minus = y;
    plus[i] += step;
    minus[i] -= step;
    // Divide by the represented spacing, not 2·step, so affine maps are exact.
    jac.col(i) = (map(plus) - map(minus)) / (plus[i] - minus[i]);
  }
  if (!jac.allFinite()) throw std::domain_error("finite-difference Jacobian has non-finite entries");
  return jac;
}

double area_defect(const std::function<StateVector(const StateVector&)>& map, const StateVector& y) {
  return area_defect(numerical_jacobian(map, y));
}

std::complex<double> principal_root(const MethodSpec& method, std::complex<double> z) {
  const auto alpha = to_doubles(method.alpha);
  const auto beta = to_doubles(method.effective_beta());
  std::vector<std::complex<double>> coeffs;
  for (std::size_t j = 0; j < alpha.size(); ++j) coeffs.push_back(alpha[j] - z * beta[j]);
  const auto roots = companion_roots(coeffs);
  const auto idx = select_principal(roots, {std::exp(z)});
  return roots[idx.front()];
}

StepTransitionMatrix step_transition(const Scheme& scheme, const LinearHamiltonian& system, double h) {
  const auto* method = std::get_if<MethodSpec>(&scheme);
  if (!method) return step_transition_subspace(scheme, system, h);

  const Matrix& a = system.system_matrix();
  const auto [lambdas, v] = system_eigen(a);
  StepTransitionMatrix st;
  Eigen::VectorXcd zeta(lambdas.size());
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    zeta(i) = principal_root(*method, h * lambdas(i));
    st.principal_roots.push_back(zeta(i));
    st.system_eigenvalues.push_back(lambdas(i));
  }
  const ComplexMatrix g = v * zeta.asDiagonal() * v.inverse();
  st.g = realify(g);

  const auto alpha = to_doubles(method->alpha);
  const auto beta = to_doubles(method->effective_beta());
  Matrix r = Matrix::Zero(a.rows(), a.cols());
  Matrix power = Matrix::Identity(a.rows(), a.cols());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    r += alpha[j] * power - h * beta[j] * a * power;
    power = power * st.g;
  }
  st.residual = r.norm();
  return st;
}

StepTransitionMatrix step_transition_subspace(const Scheme& scheme, const LinearHamiltonian& system, double h) {
  const auto t = transfer_matrix(scheme, system, h);
  const Matrix& a = system.system_matrix();
  const auto dim = a.rows();
  StepTransitionMatrix st;
  const auto [lambdas, va] = system_eigen(a);
  if (t.k == 1) {
    st.g = t.m;
  } else {
    Eigen::EigenSolver<Matrix> solver(t.m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition of the transfer matrix failed");
    const Eigen::VectorXcd mu = solver.eigenvalues();
    const ComplexMatrix w = solver.eigenvectors();
    std::vector<std::complex<double>> candidates(mu.data(), mu.data() + mu.size());
    std::vector<std::complex<double>> targets;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) targets.push_back(std::exp(h * lambdas(i)));
    const auto idx = select_principal(candidates, targets);
    ComplexMatrix selected(w.rows(), dim);
    Eigen::VectorXcd roots(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      selected.col(i) = w.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
      roots(i) = mu(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
    }
    const ComplexMatrix w0 = selected.topRows(dim);
    if (condition_number(w0) >= kMaxCondition) {
      throw std::runtime_error("principal invariant subspace is ill-conditioned (condition number >= 1e8)");
    }
    st.g = realify(w0 * roots.asDiagonal() * w0.inverse());
  }
  {
    Eigen::EigenSolver<Matrix> gs(st.g);
    for (Eigen::Index i = 0; i < gs.eigenvalues().size(); ++i) st.principal_roots.push_back(gs.eigenvalues()(i));
  }
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) st.system_eigenvalues.push_back(lambdas(i));
  st.residual = subspace_residual(t.m, st.g, t.k);
  return st;
}

double reversibility_residual(const MethodSpec& method, const GradientField& field, const Trajectory& traj) {
  const auto k = static_cast<std::size_t>(method.k);
  if (traj.states.size() < k + 1) throw std::invalid_argument("reversibility check needs at least k+1 states");
  std::vector<StateVector> reversed(traj.states.rbegin(), traj.states.rend());
  double worst = 0.0;
  for (std::size_t n = 0; n + k < reversed.size(); ++n) {
    const Window window(reversed.data() + n, k + 1);
    worst = std::max(worst, relation_residual(method, field, window, -traj.h));
  }
  return worst;
}

void EnergyDriftAccumulator::add(double t, double energy) {
  if (n_ == 0) {
    h0_ = energy;
    max_energy_ = energy;
  }
  ++n_;
  max_dev_ = std::max(max_dev_, std::abs(energy - h0_));
  max_energy_ = std::max(max_energy_, energy);
  // Welford update of the means and co-moments.
  const double dt = t - mean_t_;
  mean_t_ += dt / static_cast<double>(n_);
  mean_e_ += (energy - mean_e_) / static_cast<double>(n_);
  m2_t_ += dt * (t - mean_t_);
  c_te_ += dt * (energy - mean_e_);
}

EnergyDrift EnergyDriftAccumulator::result() const {
  EnergyDrift d;
  d.max_deviation = max_dev_;
  d.slope = m2_t_ > 0.0 ? c_te_ / m2_t_ : 0.0;
  return d;
}

EnergyDrift energy_drift(const Trajectory& traj) {
  EnergyDriftAccumulator acc;
  for (std::size_t i = 0; i < traj.energies.size(); ++i) acc.add(traj.time(i), traj.energies[i]);
  return acc.result();
}

}  // namespace geostep
