#pragma once

#include <optional>

#include "gradflow/graph.hpp"

namespace gradflow {

/// Channel-mixing weights of the parametric energy. Empty (0x0) matrices
/// mean "absent"; resolved() fills them with zeros of the channel width.
struct WeightSet {
  Matrix W;
  Matrix Omega;
  Matrix Wtilde;
  std::optional<Vector> omega_diag;
  double beta = 0.0;

  static WeightSet zeros(Eigen::Index d);
  /// Stores W symmetrized.
  WeightSet& with_W(const Matrix& w);
  /// Stores Omega symmetrized.
  WeightSet& with_Omega(const Matrix& omega);
  WeightSet& with_Wtilde(const Matrix& wtilde);

  /// Copy with every absent matrix replaced by a d x d zero matrix. Raises a
  /// validation error if a present matrix is not d x d.
  WeightSet resolved(Eigen::Index d) const;
};

struct EnergyBreakdown {
  double graph_independent = 0.0;  // sum_i <f_i, (Omega - W) f_i>
  double attraction = 0.0;         // 1/2 sum ||Theta_+ grad F||^2
  double repulsion = 0.0;          // 1/2 sum ||Theta_- grad F||^2
  double total() const { return graph_independent + attraction - repulsion; }
};

/// Half the sum over ordered adjacent pairs of ||f_j/sqrt(d_j) - f_i/sqrt(d_i)||^2.
double dirichlet_energy(const GraphOperators& ops, const Matrix& F);

/// dirichlet_energy(F) / ||F||^2; F must be nonzero.
double rayleigh_quotient(const GraphOperators& ops, const Matrix& F);

/// tr(F^T F Omega) - tr(F^T Abar F W) + 2 tr(F^T F0 Wtilde).
double parametric_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                         const WeightSet& w);

/// dirichlet_energy(F) + mu ||F - F0||^2, mu >= 0.
double lp_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0, double mu);

/// -1/2 of the gradient of parametric_energy: -F Omega + Abar F W - F0 Wtilde.
/// W and Omega must be symmetric to 1e-12.
Matrix energy_gradient(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                       const WeightSet& w);

/// Splits parametric_energy into graph-independent, attractive and repulsive
/// parts using W = Theta_+^T Theta_+ - Theta_-^T Theta_-. Requires Wtilde = 0.
EnergyBreakdown energy_decomposition(const GraphOperators& ops, const Matrix& F, const WeightSet& w);

/// Weight constructors.
Matrix make_symmetric(const Matrix& w);
Matrix make_diagonal(const Vector& w);
/// W = diag(q_a sum_b |W0_ab| + r_a) + W0, with W0 symmetric and zero on
/// the diagonal (W0 is symmetrized and its diagonal cleared first).
Matrix make_diag_dominant(const Matrix& w0, const Vector& q, const Vector& r);

/// Raises a validation error unless m is square and symmetric to 1e-12.
void require_symmetric(const Matrix& m, const char* name);

}  // namespace gradflow
