#include "spdgeo/types.hpp"

#include <cmath>

namespace spdgeo {

namespace {

EigenDecomp decompose_checked(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw convergence_error("eigendecomposition did not converge within " +
                            std::to_string(30 * m.rows()) + " iterations (n=" +
                            std::to_string(m.rows()) + ")");
  }
  EigenDecomp e{solver.eigenvectors(), solver.eigenvalues()};
  // Deterministic sign: first component of each eigenvector with nonnegligible
  // magnitude is made positive.
  const Index n = m.rows();
  for (Index k = 0; k < n; ++k) {
    const double scale = e.P.col(k).cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(e.P(i, k)) > 1e-12 * scale) {
        if (e.P(i, k) < 0.0) e.P.col(k) = -e.P.col(k);
        break;
      }
    }
  }
  return e;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: matrix must be square");
  if (a.rows() == 0) throw std::invalid_argument("SymMatrix: empty matrix");
  m_ = 0.5 * (a + a.transpose());
}

SpdMatrix::SpdMatrix(const SymMatrix& s) : sym_(s), eig_(decompose_checked(s.m())) {
  const double lo = eig_.d(0);
  const double hi = eig_.d(eig_.d.size() - 1);
  if (!(lo > kSpdEigRatio * hi) || !(lo > 0.0)) {
    throw std::domain_error("SpdMatrix: matrix is not positive definite (lambda_min=" +
                            std::to_string(lo) + ", lambda_max=" + std::to_string(hi) + ")");
  }
}

Index sym_dim(Index n) { return n * (n + 1) / 2; }

Vector sym_to_coords(const Matrix& x) {
  const Index n = x.rows();
  Vector v(sym_dim(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = x(i, i);
  const double s = std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) v(k++) = s * x(i, j);
  return v;
}

Matrix coords_to_sym(const Vector& v, Index n) {
  Matrix x(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) x(i, i) = v(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      x(i, j) = x(j, i) = s * v(k++);
    }
  return x;
}

Matrix sym_basis_matrix(Index n, Index k) {
  Vector v = Vector::Zero(sym_dim(n));
  v(k) = 1.0;
  return coords_to_sym(v, n);
}

}  // namespace spdgeo
