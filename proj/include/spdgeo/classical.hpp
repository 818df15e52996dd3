// Closed-form Riemannian operations for the named metric families on SPD(n):
// euclidean and log-euclidean with trace term, affine-invariant with trace
// term, Bures-Wasserstein, Bogoliubov-Kubo-Mori, and polar-affine as the
// square-map pullback of the affine-invariant family.
#pragma once

#include <optional>
#include <string>

#include "spdgeo/inner_products.hpp"
#include "spdgeo/matrix_functions.hpp"
#include "spdgeo/types.hpp"

namespace spdgeo {

enum class MetricKind {
  Euclidean,
  LogEuclidean,
  AffineInvariant,
  BuresWasserstein,
  Bkm,
  PolarAffine,
};

// Metric selector. The (alpha, beta) pair parameterizes the families with a
// trace term (euclidean, log-euclidean, affine-invariant, polar-affine); it
// is validated against the matrix dimension at call time. Bures-Wasserstein
// and BKM take no parameters.
struct MetricId {
  MetricKind kind = MetricKind::AffineInvariant;
  std::optional<std::pair<double, double>> ab;  // (alpha, beta)

  static MetricId euclidean(double alpha = 1.0, double beta = 0.0);
  static MetricId log_euclidean(double alpha = 1.0, double beta = 0.0);
  static MetricId affine_invariant(double alpha = 1.0, double beta = 0.0);
  static MetricId bures_wasserstein();
  static MetricId bkm();
  static MetricId polar_affine(double alpha = 1.0, double beta = 0.0);

  STParams st(Index n) const;  // throws if the pair is absent or invalid
  double alpha() const { return ab ? ab->first : 1.0; }
  double beta() const { return ab ? ab->second : 0.0; }
  std::string name() const;
};

struct GeodesicDomain {
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const { return t > t_lo && t < t_hi; }
};

double metric_value(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                    const SymMatrix& y);

double dist(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda);

GeodesicDomain geodesic_domain(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x);

// Geodesic point at time t; t must lie strictly inside geodesic_domain.
SpdMatrix exp_map(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x, double t);

SymMatrix log_map(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda);

// Covariant derivative value at sigma for field value y and coordinate
// derivative dy (the derivative of the field along x in the global chart).
SymMatrix connection(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                     const SymMatrix& y, const SymMatrix& dy);

// Correction term Gamma(sigma; x, y) = connection - coordinate derivative;
// symmetric bilinear in (x, y).
SymMatrix connection_correction(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                                const SymMatrix& y);

double sectional_curvature(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                           const SymMatrix& y);

// Quadrilinear curvature of the affine-invariant family with beta = 0:
// (alpha/2) tr(S X S Y S (Z S T - T S Z)) with S = sigma^{-1}.
double ai_riemann(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                  const SymMatrix& z, const SymMatrix& t, double alpha = 1.0);

// Bures-Wasserstein R(X, Y, X, Y) = (3/2) sum d_i d_j/(d_i+d_j) [X0', Y0']_ij^2.
double bw_riemann_diag(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y);

// Geodesic parallel transport by the metric's closed form. For
// Bures-Wasserstein the inputs must commute; otherwise an
// unsupported_operation naming bw_transport_ode is thrown.
SymMatrix parallel_transport(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda,
                             const SymMatrix& x);

// Orthonormal tangent basis element sigma^{1/2} Eb sigma^{1/2} for the
// affine-invariant family, Eb = E_k - ((p-1)/(n p)) I on diagonal elements,
// p = sqrt((alpha + n beta)/alpha). Index k enumerates the sym basis.
SymMatrix ai_basis_vector(const MetricId& id, const SpdMatrix& sigma, Index k);

// --- Bogoliubov-Kubo-Mori ---

double bkm_metric(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y);
// int_0^inf (x+t)^{-1}(y+t)^{-1} dt = log(x/y)/(x-y), 1/x on the diagonal.
double bkm_m2(double x, double y);
// int_0^inf (x+t)^{-1}(y+t)^{-1}(z+t)^{-1} dt, partial fractions with
// cancellation-safe limits at close arguments.
double bkm_m3(double x, double y, double z);
SymMatrix bkm_g(const SpdMatrix& sigma, const SymMatrix& x);
// Differential of sigma -> g_sigma, a symmetric bilinear map.
SymMatrix bkm_dg(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y);
SymMatrix bkm_connection(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                         const SymMatrix& dy);
// R(X, Y) Z as a tangent vector.
SymMatrix bkm_riemann(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                      const SymMatrix& z);

// --- Bures-Wasserstein quotient structure ---

struct BwQuotientReport {
  double submersion_residual = 0.0;   // || d_A pi(X0 A) - (Sigma X0 + X0 Sigma) ||
  double orthogonality = 0.0;         // max |<sym A, skew A^{-T}>| over probes
  double lift_norm_residual = 0.0;    // | ||X^h||^2 - g_BW(X, X) |
};

// Checks the bundle structure at fiber point A: the projection of the
// horizontal lift, orthogonality of horizontal and vertical spaces, and the
// lift isometry, using a deterministic set of probe matrices.
BwQuotientReport bw_quotient_check(const Matrix& a, const SymMatrix& x);

}  // namespace spdgeo
