#include "geostep/systems.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

#include "geostep/text_format.hpp"

namespace geostep {

Matrix structure_matrix(Eigen::Index dof) {
  Matrix j = Matrix::Zero(2 * dof, 2 * dof);
  j.topRightCorner(dof, dof).setIdentity();
  j.bottomLeftCorner(dof, dof) = -Matrix::Identity(dof, dof);
  return j;
}

GradientField::GradientField(Eigen::Index dof, VectorMap rhs, EnergyMap energy, std::string name)
    : dof_(dof), rhs_(std::move(rhs)), energy_(std::move(energy)), name_(std::move(name)) {
  if (dof < 1) throw DimensionError("gradient field needs at least one degree of freedom");
}

void GradientField::check(const StateVector& y) const {
  if (y.size() != dimension()) {
    throw DimensionError(fmt::format("state has dimension {}, field '{}' expects {}", y.size(), name_,
                                     dimension()));
  }
}

StateVector GradientField::evaluate(const StateVector& y) const {
  check(y);
  if (system_matrix_) return *system_matrix_ * y;
  return rhs_(y);
}

double GradientField::hamiltonian(const StateVector& y) const {
  check(y);
  return energy_(y);
}

StateVector GradientField::exact(const StateVector& y0, double t) const {
  if (!flow_) throw std::logic_error("field '" + name_ + "' has no exact flow");
  check(y0);
  return flow_(y0, t);
}

LinearHamiltonian::LinearHamiltonian(Matrix hessian, std::string name)
    : s_(std::move(hessian)), name_(std::move(name)) {
  if (s_.rows() != s_.cols() || s_.rows() == 0 || s_.rows() % 2 != 0) {
    throw DimensionError(
        fmt::format("Hessian must be square with even dimension, got {}x{}", s_.rows(), s_.cols()));
  }
  const double scale = std::max(1.0, s_.cwiseAbs().maxCoeff());
  if ((s_ - s_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw std::invalid_argument("Hessian is not symmetric");
  }
  a_ = structure_matrix(dof()) * s_;
}

double LinearHamiltonian::energy(const StateVector& y) const { return 0.5 * y.dot(s_ * y); }

StateVector LinearHamiltonian::exact(const StateVector& y0, double t) const {
  if (omega_) return sho_exact(*omega_, y0, t);
  const Matrix scaled = a_ * t;
  const Matrix propagator = scaled.exp();
  return propagator * y0;
}

GradientField LinearHamiltonian::field() const {
  auto a = std::make_shared<const Matrix>(a_);
  GradientField f(
      dof(), [a](const StateVector& y) -> StateVector { return *a * y; },
      [s = s_](const StateVector& y) { return 0.5 * y.dot(s * y); }, name_);
  f.system_matrix_ = std::move(a);
  f.flow_ = [self = *this](const StateVector& y0, double t) { return self.exact(y0, t); };
  return f;
}

LinearHamiltonian sho(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument(fmt::format("oscillator frequency must be positive, got {}", omega));
  }
  Matrix s(2, 2);
  s << omega * omega, 0.0, 0.0, 1.0;
  LinearHamiltonian h(std::move(s), "sho");
  h.omega_ = omega;
  return h;
}

StateVector sho_exact(double omega, const StateVector& y0, double t) {
  if (y0.size() != 2) throw DimensionError("sho_exact expects a 2-dimensional state");
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  StateVector y(2);
  y[0] = y0[0] * c + (y0[1] / omega) * s;
  y[1] = y0[1] * c - omega * y0[0] * s;
  return y;
}

GradientField pendulum(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("pendulum frequency must be positive");
  const double w2 = omega * omega;
  return GradientField(
      1,
      [w2](const StateVector& y) {
        StateVector f(2);
        f[0] = y[1];
        f[1] = -w2 * std::sin(y[0]);
        return f;
      },
      [w2](const StateVector& y) { return 0.5 * y[1] * y[1] - w2 * std::cos(y[0]); }, "pendulum");
}

double hamiltonian_energy(const GradientField& field, const StateVector& y) { return field.hamiltonian(y); }

LinearHamiltonian load_quadratic(const std::string& text, std::string name) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    std::vector<double> row;
    for (const auto& tok : tokens) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw std::invalid_argument("malformed matrix entry '" + tok + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw std::invalid_argument(fmt::format("matrix row {} has {} entries, expected {}", i + 1,
                                              rows[static_cast<std::size_t>(i)].size(), n));
    }
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return LinearHamiltonian(std::move(s), std::move(name));
}

StateVector initial_state(Eigen::Index dof, double p0, double q0) {
  StateVector y(2 * dof);
  y.head(dof).setConstant(q0);
  y.tail(dof).setConstant(p0);
  return y;
}

}  // namespace geostep
