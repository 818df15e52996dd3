// Core value types for the SPD manifold: symmetric matrices, SPD points
// with a cached spectral decomposition, and the orthonormal coordinate
// basis of Sym(n) used by the geodesic integrators.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spdgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown for operations a metric does not provide in closed form.
class unsupported_operation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an eigensolver fails to converge.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSpdEigRatio = 1e-12;       // lambda_min > ratio * lambda_max
inline constexpr double kDividedDiffSwitch = 1e-7;  // relative spacing below which f' is used
inline constexpr double kSecondDiffSwitch = 1e-5;   // relative spacing for second-order limits
inline constexpr double kCommuteTol = 1e-10;        // relative commutator tolerance
inline constexpr double kSpacingEngage = 1e-6;      // relative eigenvalue spacing for eigvec bound

struct EigenDecomp {
  Matrix P;  // orthogonal, columns are eigenvectors
  Vector d;  // eigenvalues, ascending
};

// Dense real symmetric matrix. Construction symmetrizes: (A + A^T)/2.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);
  static SymMatrix Zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix Identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  const Matrix& m() const { return m_; }
  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

// Symmetric positive definite matrix. Rejects lambda_min <= kSpdEigRatio * lambda_max.
// The spectral decomposition is computed once at construction and cached.
class SpdMatrix {
 public:
  explicit SpdMatrix(const SymMatrix& s);
  explicit SpdMatrix(const Matrix& a) : SpdMatrix(SymMatrix(a)) {}
  static SpdMatrix Identity(Index n) { return SpdMatrix(Matrix::Identity(n, n)); }

  const Matrix& m() const { return sym_.m(); }
  const SymMatrix& sym() const { return sym_; }
  Index dim() const { return sym_.dim(); }
  const EigenDecomp& eig() const { return eig_; }
  double operator()(Index i, Index j) const { return sym_(i, j); }

 private:
  SymMatrix sym_;
  EigenDecomp eig_;
};

// Orthonormal basis of Sym(n) under Frobenius: E_ii, then (C_ij + C_ji)/sqrt(2) for i<j,
// pairs enumerated lexicographically. sym_dim(n) = n(n+1)/2.
Index sym_dim(Index n);
Vector sym_to_coords(const Matrix& x);
Matrix coords_to_sym(const Vector& v, Index n);
Matrix sym_basis_matrix(Index n, Index k);

}  // namespace spdgeo
