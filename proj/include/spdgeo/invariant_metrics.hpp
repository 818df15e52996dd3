// The general rotation-invariant metric on SPD(n), described by three
// multivariate eigenvalue functions (alpha, beta, gamma) subject to
// compatibility, positivity and symmetry conditions; validation on sampled
// grids, evaluation, the dual metric, pullbacks, invariance subclass checks,
// and the constructive eigenvalue/eigenvector continuity bounds.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spdgeo/kernels.hpp"
#include "spdgeo/matrix_functions.hpp"
#include "spdgeo/types.hpp"

namespace spdgeo {

using MultivariateFn = std::function<double(const Vector&)>;

// The argument vector is pre-permuted: alpha and beta read (v0, v1) as the
// distinguished eigenvalue pair, gamma reads v0 as the distinguished entry;
// the remaining entries are the unordered tail. alpha, gamma must be
// positive; beta may take either sign.
struct MetricTriple {
  Index n = 0;
  MultivariateFn alpha;
  MultivariateFn beta;
  MultivariateFn gamma;
  std::string name;
};

MetricTriple frobenius_triple(Index n);
MetricTriple triple_from_kernel(const KernelSpec& k, Index n);
MetricTriple triple_from_bost(const BostSpec& b);
MetricTriple triple_from_separable(const SeparableSpec& s, Index n);

// Diagonal-block matrix S(d): S_ii = gamma with d_i first, S_ij = beta with
// (d_i, d_j) first.
struct SMatrix {
  Vector d;
  Matrix S;
};

SMatrix s_matrix(const MetricTriple& t, const Vector& d);

// Off-diagonal weight alpha evaluated with (d_i, d_j) leading.
double triple_alpha_at(const MetricTriple& t, const Vector& d, Index i, Index j);

struct GridSpec {
  Index n = 2;
  int random_points = 200;
  unsigned long long seed = 0xC0FFEEULL;
  double lo = 0.05;   // log-uniform sampling range
  double hi = 20.0;
};

// Deterministic tensor grid (n <= 4) plus log-uniform random points plus
// forced slices with equal leading pair.
std::vector<Vector> validation_grid(const GridSpec& g);

struct ConditionReport {
  std::string name;
  bool pass = true;
  Vector worst_sample;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<ConditionReport> conditions;
  bool all_pass() const;
  std::string to_text() const;  // one line per condition
};

// Checks compatibility (gamma = alpha + beta on the equal-pair slice, relative
// 1e-9), positivity (smallest eigenvalue of S(d) > 0) and the declared
// symmetries, by explicit evaluation on the grid.
ValidationReport validate_triple(const MetricTriple& t, const GridSpec& grid);

double metric_eval(const MetricTriple& t, const SpdMatrix& sigma, const SymMatrix& x,
                   const SymMatrix& y);

// Dual metric on covectors represented as symmetric matrices through the
// Frobenius pairing: off-diagonal weights 1/alpha, diagonal block S(d)^{-1}.
double cometric_eval(const MetricTriple& t, const SpdMatrix& sigma, const SymMatrix& w,
                     const SymMatrix& w2);

// Triple of the pullback metric under a scalar diffeomorphism f:
//   alpha_f(d) = alpha(f(d)) * f^[1](d0, d1)^2
//   beta_f(d)  = beta(f(d))  * f'(d0) f'(d1)
//   gamma_f(d) = gamma(f(d)) * f'(d0)^2
// With check_diffeo set, f' is sampled and must keep a constant sign.
MetricTriple pullback_triple(const MetricTriple& t, const UnivariateFn& f,
                             bool check_diffeo = true);

struct InvarianceReport {
  double max_rel_dev = 0.0;
  Vector worst_sample;
  bool pass(double tol) const { return max_rel_dev <= tol; }
};

// Functional equation f(lambda d) = lambda^{-2} f(d) for f in {alpha, beta, gamma}.
InvarianceReport scaling_invariance_check(const MetricTriple& t, const std::vector<Vector>& samples);
// Functional equations gamma(1/d) = d0^4 gamma(d), f(1/d) = d0^2 d1^2 f(d).
InvarianceReport inversion_invariance_check(const MetricTriple& t,
                                            const std::vector<Vector>& samples);

struct ContinuityBounds {
  double dist_eigs = 0.0;   // ||D - Delta||_F, ascending order
  double dist_mats = 0.0;   // ||Sigma - Lambda||_F
  double eigvec_lhs = 0.0;  // ||P - Q||_F^2 for the aligned P
  double eigvec_rhs = 0.0;  // 4 sqrt(n/m) ||Sigma - Lambda||
  bool eigvec_engaged = false;
  bool eig_bound_holds = false;
  bool eigvec_bound_holds = false;
};

// Aligns a diagonalizer of sigma to the one of lambda through the polar
// factor of the block-diagonal part of P0^T Q, then evaluates both bounds.
// The eigenvector bound is skipped when sigma has (near-)repeated eigenvalues.
ContinuityBounds eig_continuity_bounds(const SpdMatrix& sigma, const SpdMatrix& lambda);

}  // namespace spdgeo
