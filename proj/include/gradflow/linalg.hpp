#pragma once

#include <Eigen/Dense>

namespace gradflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues closer than this are treated as one degenerate eigenvalue.
inline constexpr double kTieTolerance = 1e-9;

/// Eigenpairs of a symmetric matrix. values ascend; column k of vectors is the
/// unit eigenvector for values(k), oriented so that its largest-magnitude
/// entry is positive (ties resolved toward the lowest index).
struct SpectralPair {
  Vector values;
  Matrix vectors;
};

/// Symmetrizes m by averaging with its transpose, then diagonalizes.
/// Rejects non-square input and asymmetry above 1e-12 relative to max|m|.
SpectralPair spectral_decomposition(const Matrix& m);

Matrix symmetrize(const Matrix& m);

/// Column-stacking vectorization: vec(AXB) = (B^T kron A) vec(X).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of values (ascending, PSD) exceeding the tie
/// tolerance, or a negative number if every value ties with zero.
double smallest_positive(const Vector& values);

bool is_finite(const Matrix& m);

}  // namespace gradflow
