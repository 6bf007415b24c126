#include "gradflow/energy.hpp"

#include <cmath>
#include <string>

#include "gradflow/errors.hpp"

namespace gradflow {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_features(const GraphOperators& ops, const Matrix& F) {
  if (F.rows() != static_cast<Eigen::Index>(ops.num_nodes()) || F.cols() == 0) {
    fail(ErrorKind::Validation, "features " + shape(F) + " do not match " +
                                    std::to_string(ops.num_nodes()) + " nodes");
  }
  if (!is_finite(F)) fail(ErrorKind::Numeric, "features contain NaN or Inf");
}

void check_source(const Matrix& F, const Matrix& F0) {
  if (F0.rows() != F.rows() || F0.cols() != F.cols()) {
    fail(ErrorKind::Validation, "source " + shape(F0) + " does not match features " + shape(F));
  }
}

void check_square(const Matrix& m, Eigen::Index d, const char* name) {
  if (m.rows() != d || m.cols() != d) {
    fail(ErrorKind::Validation, std::string(name) + " is " + shape(m) + ", expected " +
                                    std::to_string(d) + "x" + std::to_string(d));
  }
}

}  // namespace

void require_symmetric(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) fail(ErrorKind::Validation, std::string(name) + " is not square");
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorKind::Validation, std::string(name) + " is not symmetric");
  }
}

WeightSet WeightSet::zeros(Eigen::Index d) {
  WeightSet w;
  w.W = Matrix::Zero(d, d);
  w.Omega = Matrix::Zero(d, d);
  w.Wtilde = Matrix::Zero(d, d);
  return w;
}

WeightSet& WeightSet::with_W(const Matrix& w) {
  W = symmetrize(w);
  return *this;
}

WeightSet& WeightSet::with_Omega(const Matrix& omega) {
  Omega = symmetrize(omega);
  return *this;
}

WeightSet& WeightSet::with_Wtilde(const Matrix& wtilde) {
  Wtilde = wtilde;
  return *this;
}

WeightSet WeightSet::resolved(Eigen::Index d) const {
  WeightSet out = *this;
  auto fill = [d](Matrix& m, const char* name) {
    if (m.size() == 0) {
      m = Matrix::Zero(d, d);
    } else {
      check_square(m, d, name);
    }
  };
  fill(out.W, "W");
  fill(out.Omega, "Omega");
  fill(out.Wtilde, "Wtilde");
  if (out.omega_diag && out.omega_diag->size() != d) {
    fail(ErrorKind::Validation, "omega has length " + std::to_string(out.omega_diag->size()) +
                                    ", expected " + std::to_string(d));
  }
  return out;
}

double dirichlet_energy(const GraphOperators& ops, const Matrix& F) {
  check_features(ops, F);
  const Vector& sd = ops.sqrt_degree();
  double total = 0.0;
  for (const auto& e : ops.graph().edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    total += (F.row(v) / sd(v) - F.row(u) / sd(u)).squaredNorm();
  }
#ifndef NDEBUG
  const double trace = (F.transpose() * ops.laplacian() * F).trace();
  if (std::abs(trace - total) > 1e-9 * std::max(1.0, std::abs(total))) {
    fail(ErrorKind::Numeric, "edge-sum and trace forms of the Dirichlet energy disagree");
  }
#endif
  return total;
}

double rayleigh_quotient(const GraphOperators& ops, const Matrix& F) {
  check_features(ops, F);
  const double norm2 = F.squaredNorm();
  if (norm2 == 0.0) fail(ErrorKind::Validation, "Rayleigh quotient of a zero feature matrix");
  return dirichlet_energy(ops, F) / norm2;
}

double parametric_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                         const WeightSet& w) {
  check_features(ops, F);
  check_source(F, F0);
  const WeightSet r = w.resolved(F.cols());
  const double self = (F * r.Omega).cwiseProduct(F).sum();
  const double coupling = (ops.adjacency() * F * r.W).cwiseProduct(F).sum();
  const double source = 2.0 * (F0 * r.Wtilde).cwiseProduct(F).sum();
  return self - coupling + source;
}

double lp_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0, double mu) {
  if (!(mu >= 0.0)) fail(ErrorKind::Validation, "label-propagation mu must be non-negative");
  check_features(ops, F);
  check_source(F, F0);
  return dirichlet_energy(ops, F) + mu * (F - F0).squaredNorm();
}

Matrix energy_gradient(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                       const WeightSet& w) {
  check_features(ops, F);
  check_source(F, F0);
  const WeightSet r = w.resolved(F.cols());
  require_symmetric(r.W, "W");
  require_symmetric(r.Omega, "Omega");
  return -F * r.Omega + ops.adjacency() * F * r.W - F0 * r.Wtilde;
}

EnergyBreakdown energy_decomposition(const GraphOperators& ops, const Matrix& F, const WeightSet& w) {
  check_features(ops, F);
  const WeightSet r = w.resolved(F.cols());
  if (r.Wtilde.cwiseAbs().maxCoeff() != 0.0) {
    fail(ErrorKind::Validation, "energy decomposition requires Wtilde = 0");
  }
  require_symmetric(r.W, "W");
  require_symmetric(r.Omega, "Omega");

  const SpectralPair eig = spectral_decomposition(r.W);
  const Eigen::Index d = F.cols();
  // Rows of theta_plus / theta_minus are sqrt(|mu|) psi^T for positive / negative mu.
  Matrix theta_plus = Matrix::Zero(d, d);
  Matrix theta_minus = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double mu = eig.values(k);
    if (std::abs(mu) < 1e-12) continue;
    auto row = std::sqrt(std::abs(mu)) * eig.vectors.col(k).transpose();
    (mu > 0 ? theta_plus : theta_minus).row(k) = row;
  }

  EnergyBreakdown out;
  out.graph_independent = (F * (r.Omega - r.W)).cwiseProduct(F).sum();
  const Vector& sd = ops.sqrt_degree();
  for (const auto& e : ops.graph().edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    const Vector grad = (F.row(v) / sd(v) - F.row(u) / sd(u)).transpose();
    out.attraction += (theta_plus * grad).squaredNorm();
    out.repulsion += (theta_minus * grad).squaredNorm();
  }
  return out;
}

Matrix make_symmetric(const Matrix& w) { return symmetrize(w); }

Matrix make_diagonal(const Vector& w) { return w.asDiagonal(); }

Matrix make_diag_dominant(const Matrix& w0, const Vector& q, const Vector& r) {
  Matrix off = symmetrize(w0);
  const Eigen::Index d = off.rows();
  if (q.size() != d || r.size() != d) {
    fail(ErrorKind::Validation, "diag_dom needs q and r of length " + std::to_string(d));
  }
  off.diagonal().setZero();
  Matrix out = off;
  for (Eigen::Index a = 0; a < d; ++a) out(a, a) = q(a) * off.row(a).cwiseAbs().sum() + r(a);
  return out;
}

}  // namespace gradflow
