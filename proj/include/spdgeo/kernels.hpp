// Metrics on SPD(n) indexed by a positive symmetric bivariate weight on
// eigenvalue pairs: the plain weighted family, the mean-power subfamily with
// its completeness dichotomy, the trace-term extension, and the separable
// family whose dual has a closed form.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spdgeo/matrix_functions.hpp"
#include "spdgeo/types.hpp"

namespace spdgeo {

using BivariateFn = std::function<double(double, double)>;
using ScalarFn = std::function<double(double)>;

// Positive symmetric bivariate weight phi; the metric divides squared
// eigenbasis components by phi(d_i, d_j). dphi1 is the partial derivative in
// the first argument (the second follows by symmetry); when present it
// enables exact derivatives of Gram matrices in the geodesic integrator.
struct KernelSpec {
  BivariateFn phi;
  std::string name;
  BivariateFn dphi1;
};

// phi(x, y) = a * m(x, y)^theta for a symmetric homogeneous mean m.
struct MeanKernelSpec {
  BivariateFn m;
  double theta = 0.0;
  double a = 1.0;
  std::string mean_name;

  KernelSpec to_kernel() const;
};

// alpha * tr(Psi(X)^2) + beta * tr(Psi(X))^2 with Psi the phi^{-1/2}-weighted map.
struct BostSpec {
  KernelSpec phi;
  double alpha = 1.0;
  double beta = 0.0;
  Index n = 0;

  BostSpec(KernelSpec k, double a, double b, Index dim);
};

// tr(Psi(X)^2) + tr(Psi1(X)) tr(Psi2(X)) with [Psi(X)]_ij = psi(d_i,d_j) X'_ij
// and Psi_k diagonal maps psi_k(d_i) X'_ii. psi1/psi2 may take either sign;
// validity is the per-point condition ||x|| ||y|| - <x,y> < 2 on
// x_i = psi1(d_i)/psi(d_i,d_i), y_i = psi2(d_i)/psi(d_i,d_i).
struct SeparableSpec {
  BivariateFn psi;
  ScalarFn psi1;
  ScalarFn psi2;
  std::string name;
};

// Builtin means: arithmetic, geometric, harmonic, logarithmic.
BivariateFn builtin_mean(const std::string& name);
double log_mean(double x, double y);

// Builtin weights: euclidean, log_euclidean, affine_invariant, polar_affine,
// bures_wasserstein, bkm. Throws std::invalid_argument on unknown names.
KernelSpec builtin_kernel(const std::string& name);

double bod_eval(const KernelSpec& k, const SpdMatrix& sigma, const SymMatrix& x,
                const SymMatrix& y);

// Equivariant map with entrywise weights phi^{-1/2}; tr(psi_apply(X)^2)
// recovers bod_eval(X, X).
SymMatrix psi_apply(const KernelSpec& k, const SpdMatrix& sigma, const SymMatrix& x);

double bost_eval(const BostSpec& b, const SpdMatrix& sigma, const SymMatrix& x,
                 const SymMatrix& y);

// Dual weight 1/phi.
KernelSpec bod_cometric(const KernelSpec& k);
// Dual parameters (1/phi, 1/alpha, -beta / (alpha (alpha + n beta))).
BostSpec bost_cometric(const BostSpec& b);

// Weight of the pullback metric under a scalar diffeomorphism f:
// phi_f(x, y) = phi(f(x), f(y)) / f^[1](x, y)^2. Monotonicity of f is
// checked by sampling.
KernelSpec pullback_kernel(const KernelSpec& k, const UnivariateFn& f);

// Weight of (1-t) g_1 + t g_2: phi1 phi2 / ((1-t) phi2 + t phi1).
KernelSpec convex_combine(const KernelSpec& k1, const KernelSpec& k2, double t);

struct CompletenessVerdict {
  bool complete;            // exact: theta == 2
  double witness_length;    // length of s -> s*I over [1e-8, 1]
  bool witness_diverged;    // witness_length > 10
};

// Geodesic completeness holds exactly when theta == 2; the quadrature witness
// integrates the speed of the ray s -> s*I toward the boundary.
CompletenessVerdict completeness_power(const MeanKernelSpec& mk, Index n = 2);

double separable_eval(const SeparableSpec& s, const SpdMatrix& sigma, const SymMatrix& x,
                      const SymMatrix& y);

// Diagonal-block matrix of the separable metric at eigenvalues d:
// S = Delta (I + (x y^T + y x^T)/2) Delta, Delta = diag(psi(d_i, d_i)).
Matrix separable_s_matrix(const SeparableSpec& s, const Vector& d);

struct SeparableCometric {
  Matrix s_inverse;     // closed-form inverse of the diagonal block
  SeparableSpec dual;   // dual spec; trace-term maps frozen at the given d
};

// Closed-form dual at eigenvalues d. Throws std::domain_error when the
// positivity condition fails at d.
SeparableCometric separable_cometric(const SeparableSpec& s, const Vector& d);

}  // namespace spdgeo
