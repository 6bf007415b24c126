#include "gradflow/linalg.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "gradflow/errors.hpp"

namespace gradflow {

Matrix symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::Validation, "matrix must be square, got " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()));
  }
  return 0.5 * (m + m.transpose());
}

SpectralPair spectral_decomposition(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::Validation, "spectral decomposition needs a non-empty square matrix");
  }
  if (!is_finite(m)) fail(ErrorKind::Numeric, "matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    fail(ErrorKind::Validation, "matrix is not symmetric (max |m - m^T| = " + std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigensolver did not converge");

  SpectralPair out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
    auto col = out.vectors.col(k);
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      // Near-ties within roundoff go to the lower index.
      if (std::abs(col(i)) > best_abs + 1e-12) {
        best_abs = std::abs(col(i));
        best = i;
      }
    }
    if (col(best) < 0) col = -col;
  }
  return out;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

double smallest_positive(const Vector& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > kTieTolerance) return values(i);
  }
  return -1.0;
}

bool is_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace gradflow
