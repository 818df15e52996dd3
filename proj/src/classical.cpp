#include "spdgeo/classical.hpp"

#include <cmath>
#include <limits>

namespace spdgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix spd_inv_mul(const SpdMatrix& sigma, const Matrix& x) {
  const EigenDecomp& e = sigma.eig();
  return e.P * e.d.cwiseInverse().asDiagonal() * (e.P.transpose() * x);
}

// pow2 differential: sigma x + x sigma
SymMatrix dpow2(const SpdMatrix& sigma, const SymMatrix& x) {
  return SymMatrix(sigma.m() * x.m() + x.m() * sigma.m());
}

GeodesicDomain interval_from_spectrum(double lmin, double lmax) {
  GeodesicDomain dom;
  if (lmin < 0.0 && 0.0 < lmax) {
    dom.t_lo = -1.0 / lmax;
    dom.t_hi = -1.0 / lmin;
  } else if (lmin >= 0.0) {
    dom.t_lo = lmax > 0.0 ? -1.0 / lmax : -kInf;
    dom.t_hi = kInf;
  } else {  // lmax <= 0
    dom.t_lo = -kInf;
    dom.t_hi = -1.0 / lmin;
  }
  return dom;
}

void require_in_domain(const GeodesicDomain& dom, double t) {
  if (!dom.contains(t)) {
    throw std::domain_error("exp_map: t=" + std::to_string(t) +
                            " outside geodesic domain (" + std::to_string(dom.t_lo) + ", " +
                            std::to_string(dom.t_hi) + ")");
  }
}

[[noreturn]] void bkm_unsupported(const std::string& op) {
  throw unsupported_operation("bkm: " + op + " is not available in closed form");
}

Vector generalized_eigs(const SpdMatrix& sigma, const SymMatrix& x) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(x.m(), sigma.m());
  if (ges.info() != Eigen::Success) {
    throw convergence_error("generalized eigendecomposition did not converge");
  }
  return ges.eigenvalues();
}

// det(sigma)^{(p-1)/n} sigma and the matching differential; isometry onto the
// beta = 0 affine-invariant family.
struct VolumeScaling {
  double p;
  double c;  // det(sigma)^{(p-1)/n}

  VolumeScaling(const SpdMatrix& sigma, double alpha, double beta) {
    const double n = static_cast<double>(sigma.dim());
    p = std::sqrt((alpha + n * beta) / alpha);
    const double logdet = sigma.eig().d.array().log().sum();
    c = std::exp((p - 1.0) / n * logdet);
  }

  SpdMatrix point(const SpdMatrix& sigma) const { return SpdMatrix(c * sigma.m()); }

  SymMatrix tangent(const SpdMatrix& sigma, const SymMatrix& x) const {
    const double n = static_cast<double>(sigma.dim());
    const double tr = spd_inv_mul(sigma, x.m()).trace();
    return SymMatrix(c * (x.m() + (p - 1.0) / n * tr * sigma.m()));
  }
};

double bw_metric(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) acc += xp(i, j) * yp(i, j) / (e.d(i) + e.d(j));
  return 0.5 * acc;
}

}  // namespace

MetricId MetricId::euclidean(double alpha, double beta) {
  return {MetricKind::Euclidean, std::make_pair(alpha, beta)};
}
MetricId MetricId::log_euclidean(double alpha, double beta) {
  return {MetricKind::LogEuclidean, std::make_pair(alpha, beta)};
}
MetricId MetricId::affine_invariant(double alpha, double beta) {
  return {MetricKind::AffineInvariant, std::make_pair(alpha, beta)};
}
MetricId MetricId::bures_wasserstein() { return {MetricKind::BuresWasserstein, std::nullopt}; }
MetricId MetricId::bkm() { return {MetricKind::Bkm, std::nullopt}; }
MetricId MetricId::polar_affine(double alpha, double beta) {
  return {MetricKind::PolarAffine, std::make_pair(alpha, beta)};
}

STParams MetricId::st(Index n) const {
  if (!ab) throw std::domain_error("metric '" + name() + "' carries no (alpha, beta) parameters");
  return STParams(ab->first, ab->second, n);
}

std::string MetricId::name() const {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::LogEuclidean: return "log_euclidean";
    case MetricKind::AffineInvariant: return "affine_invariant";
    case MetricKind::BuresWasserstein: return "bures_wasserstein";
    case MetricKind::Bkm: return "bkm";
    case MetricKind::PolarAffine: return "polar_affine";
  }
  return "?";
}

double metric_value(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                    const SymMatrix& y) {
  switch (id.kind) {
    case MetricKind::Euclidean: {
      const STParams p = id.st(sigma.dim());
      return p.alpha * (x.m() * y.m()).trace() + p.beta * x.m().trace() * y.m().trace();
    }
    case MetricKind::LogEuclidean: {
      const STParams p = id.st(sigma.dim());
      const UnivariateFn lg = fn_log();
      const SymMatrix dx = univariate_diff(lg, sigma, x);
      const SymMatrix dy = univariate_diff(lg, sigma, y);
      return p.alpha * (dx.m() * dy.m()).trace() + p.beta * dx.m().trace() * dy.m().trace();
    }
    case MetricKind::AffineInvariant: {
      const STParams p = id.st(sigma.dim());
      const Matrix sx = spd_inv_mul(sigma, x.m());
      const Matrix sy = spd_inv_mul(sigma, y.m());
      return p.alpha * (sx * sy).trace() + p.beta * sx.trace() * sy.trace();
    }
    case MetricKind::BuresWasserstein:
      return bw_metric(sigma, x, y);
    case MetricKind::Bkm:
      return bkm_metric(sigma, x, y);
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      const SpdMatrix s2(sigma.m() * sigma.m());
      return metric_value(ai, s2, dpow2(sigma, x), dpow2(sigma, y));
    }
  }
  throw std::logic_error("unreachable");
}

double dist(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda) {
  switch (id.kind) {
    case MetricKind::Euclidean: {
      const STParams p = id.st(sigma.dim());
      const Matrix diff = lambda.m() - sigma.m();
      return std::sqrt(p.alpha * diff.squaredNorm() + p.beta * diff.trace() * diff.trace());
    }
    case MetricKind::LogEuclidean: {
      const STParams p = id.st(sigma.dim());
      const Matrix diff = spd_log(lambda).m() - spd_log(sigma).m();
      return std::sqrt(p.alpha * diff.squaredNorm() + p.beta * diff.trace() * diff.trace());
    }
    case MetricKind::AffineInvariant: {
      const STParams p = id.st(sigma.dim());
      const Vector lam = generalized_eigs(sigma, lambda.sym());
      double sq = 0.0, tr = 0.0;
      for (Index i = 0; i < lam.size(); ++i) {
        const double l = std::log(lam(i));
        sq += l * l;
        tr += l;
      }
      return std::sqrt(p.alpha * sq + p.beta * tr * tr);
    }
    case MetricKind::BuresWasserstein: {
      const double d2 =
          sigma.m().trace() + lambda.m().trace() - 2.0 * sqrt_product(sigma, lambda).trace();
      return std::sqrt(std::max(0.0, d2));
    }
    case MetricKind::Bkm:
      bkm_unsupported("distance");
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      return dist(ai, SpdMatrix(sigma.m() * sigma.m()), SpdMatrix(lambda.m() * lambda.m()));
    }
  }
  throw std::logic_error("unreachable");
}

GeodesicDomain geodesic_domain(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x) {
  switch (id.kind) {
    case MetricKind::Euclidean: {
      const Vector lam = generalized_eigs(sigma, x);
      return interval_from_spectrum(lam(0), lam(lam.size() - 1));
    }
    case MetricKind::BuresWasserstein: {
      const SymMatrix x0 = sylvester_lift(sigma, x);
      const EigenDecomp e = eigh(x0);
      return interval_from_spectrum(e.d(0), e.d(e.d.size() - 1));
    }
    case MetricKind::LogEuclidean:
    case MetricKind::AffineInvariant:
    case MetricKind::PolarAffine:
      return GeodesicDomain{};
    case MetricKind::Bkm:
      bkm_unsupported("geodesics");
  }
  throw std::logic_error("unreachable");
}

SpdMatrix exp_map(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x, double t) {
  require_in_domain(geodesic_domain(id, sigma, x), t);
  switch (id.kind) {
    case MetricKind::Euclidean:
      return SpdMatrix(sigma.m() + t * x.m());
    case MetricKind::LogEuclidean: {
      const SymMatrix w = univariate_diff(fn_log(), sigma, x);
      return spd_exp_sym(SymMatrix(spd_log(sigma).m() + t * w.m()));
    }
    case MetricKind::AffineInvariant: {
      const SpdMatrix rt = spd_sqrt(sigma);
      const Matrix irt =
          rt.eig().P * rt.eig().d.cwiseInverse().asDiagonal() * rt.eig().P.transpose();
      const SymMatrix m(irt * x.m() * irt);
      const SpdMatrix e = spd_exp_sym(SymMatrix(t * m.m()));
      return SpdMatrix(rt.m() * e.m() * rt.m());
    }
    case MetricKind::BuresWasserstein: {
      const SymMatrix x0 = sylvester_lift(sigma, x);
      return SpdMatrix(sigma.m() + t * x.m() + t * t * (x0.m() * sigma.m() * x0.m()));
    }
    case MetricKind::Bkm:
      bkm_unsupported("exp_map");
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      const SpdMatrix g = exp_map(ai, SpdMatrix(sigma.m() * sigma.m()), dpow2(sigma, x), t);
      return spd_sqrt(g);
    }
  }
  throw std::logic_error("unreachable");
}

SymMatrix log_map(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda) {
  switch (id.kind) {
    case MetricKind::Euclidean:
      return SymMatrix(lambda.m() - sigma.m());
    case MetricKind::LogEuclidean:
      return dlog_inverse(sigma, SymMatrix(spd_log(lambda).m() - spd_log(sigma).m()));
    case MetricKind::AffineInvariant: {
      const SpdMatrix rt = spd_sqrt(sigma);
      const Matrix irt =
          rt.eig().P * rt.eig().d.cwiseInverse().asDiagonal() * rt.eig().P.transpose();
      const SymMatrix inner(irt * lambda.m() * irt);
      const SymMatrix lg = spd_log(SpdMatrix(inner.m()));
      return SymMatrix(rt.m() * lg.m() * rt.m());
    }
    case MetricKind::BuresWasserstein: {
      const Matrix s = sqrt_product(sigma, lambda);
      return SymMatrix(s + s.transpose() - 2.0 * sigma.m());
    }
    case MetricKind::Bkm:
      bkm_unsupported("log_map");
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      const SymMatrix w =
          log_map(ai, SpdMatrix(sigma.m() * sigma.m()), SpdMatrix(lambda.m() * lambda.m()));
      return sylvester_lift(sigma, w);
    }
  }
  throw std::logic_error("unreachable");
}

SymMatrix connection_correction(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                                const SymMatrix& y) {
  switch (id.kind) {
    case MetricKind::Euclidean:
      return SymMatrix::Zero(sigma.dim());
    case MetricKind::AffineInvariant: {
      const Matrix siy = spd_inv_mul(sigma, y.m());
      const Matrix six = spd_inv_mul(sigma, x.m());
      return SymMatrix(-0.5 * (x.m() * siy + y.m() * six));
    }
    case MetricKind::BuresWasserstein: {
      const SymMatrix x0 = sylvester_lift(sigma, x);
      const SymMatrix y0 = sylvester_lift(sigma, y);
      return SymMatrix(-(x0.m() * sigma.m() * y0.m() + y0.m() * sigma.m() * x0.m()));
    }
    case MetricKind::LogEuclidean:
      return dlog_inverse(sigma, univariate_diff2(fn_log(), sigma, x, y));
    case MetricKind::Bkm:
      return SymMatrix(0.5 * dlog_inverse(sigma, bkm_dg(sigma, x, y)).m());
    case MetricKind::PolarAffine: {
      const SpdMatrix m2(sigma.m() * sigma.m());
      const SymMatrix u = dpow2(sigma, x);
      const SymMatrix v = dpow2(sigma, y);
      const Matrix miv = spd_inv_mul(m2, v.m());
      const Matrix miu = spd_inv_mul(m2, u.m());
      const Matrix gamma_ai = -0.5 * (u.m() * miv + v.m() * miu);
      return sylvester_lift(sigma, SymMatrix(x.m() * y.m() + y.m() * x.m() + gamma_ai));
    }
  }
  throw std::logic_error("unreachable");
}

SymMatrix connection(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                     const SymMatrix& y, const SymMatrix& dy) {
  if (id.kind == MetricKind::Bkm) {
    return bkm_connection(sigma, x, y, dy);
  }
  return SymMatrix(dy.m() + connection_correction(id, sigma, x, y).m());
}

double ai_riemann(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                  const SymMatrix& z, const SymMatrix& t, double alpha) {
  const Matrix sx = spd_inv_mul(sigma, x.m());
  const Matrix sy = spd_inv_mul(sigma, y.m());
  const Matrix sz = spd_inv_mul(sigma, z.m());
  const Matrix st = spd_inv_mul(sigma, t.m());
  return 0.5 * alpha * (sx * sy * (sz * st - st * sz)).trace();
}

double bw_riemann_diag(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix x0 = e.P.transpose() * sylvester_lift(sigma, x).m() * e.P;
  const Matrix y0 = e.P.transpose() * sylvester_lift(sigma, y).m() * e.P;
  const Matrix c = x0 * y0 - y0 * x0;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) acc += e.d(i) * e.d(j) / (e.d(i) + e.d(j)) * c(i, j) * c(i, j);
  return 1.5 * acc;
}

namespace {

double plane_gram(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                  const SymMatrix& y) {
  const double gxx = metric_value(id, sigma, x, x);
  const double gyy = metric_value(id, sigma, y, y);
  const double gxy = metric_value(id, sigma, x, y);
  const double den = gxx * gyy - gxy * gxy;
  if (!(den > 1e-14 * std::max(gxx * gyy, 1e-300))) {
    throw std::domain_error("sectional_curvature: degenerate plane");
  }
  return den;
}

}  // namespace

double sectional_curvature(const MetricId& id, const SpdMatrix& sigma, const SymMatrix& x,
                           const SymMatrix& y) {
  switch (id.kind) {
    case MetricKind::Euclidean:
    case MetricKind::LogEuclidean:
      return 0.0;
    case MetricKind::AffineInvariant: {
      const STParams p = id.st(sigma.dim());
      if (p.beta != 0.0) {
        const VolumeScaling vs(sigma, p.alpha, p.beta);
        const MetricId ai0 = MetricId::affine_invariant(p.alpha, 0.0);
        return sectional_curvature(ai0, vs.point(sigma), vs.tangent(sigma, x),
                                   vs.tangent(sigma, y));
      }
      const double num = ai_riemann(sigma, x, y, x, y, p.alpha);
      return num / plane_gram(id, sigma, x, y);
    }
    case MetricKind::BuresWasserstein:
      return bw_riemann_diag(sigma, x, y) / plane_gram(id, sigma, x, y);
    case MetricKind::Bkm: {
      const SymMatrix rz = bkm_riemann(sigma, x, y, y);
      const double num = bkm_metric(sigma, rz, x);
      return num / plane_gram(id, sigma, x, y);
    }
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      return sectional_curvature(ai, SpdMatrix(sigma.m() * sigma.m()), dpow2(sigma, x),
                                 dpow2(sigma, y));
    }
  }
  throw std::logic_error("unreachable");
}

SymMatrix parallel_transport(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda,
                             const SymMatrix& x) {
  switch (id.kind) {
    case MetricKind::Euclidean:
      return x;
    case MetricKind::LogEuclidean:
      return dlog_inverse(lambda, univariate_diff(fn_log(), sigma, x));
    case MetricKind::AffineInvariant: {
      const Matrix a = sqrt_product(lambda, spd_inverse(sigma));
      return SymMatrix(a * x.m() * a.transpose());
    }
    case MetricKind::BuresWasserstein: {
      const Matrix comm = sigma.m() * lambda.m() - lambda.m() * sigma.m();
      const double scale = sigma.m().norm() * lambda.m().norm();
      if (comm.norm() > kCommuteTol * scale) {
        throw unsupported_operation(
            "bures_wasserstein closed-form transport requires commuting endpoints; "
            "use bw_transport_ode");
      }
      // Common eigenbasis: diagonalize sigma, then lambda within eigenspaces
      // of (near-)repeated eigenvalues of sigma.
      const EigenDecomp& es = sigma.eig();
      const Index n = sigma.dim();
      Matrix p = es.P;
      const Matrix b = p.transpose() * lambda.m() * p;
      Vector delta(n);
      const double dscale = std::max(std::abs(es.d(n - 1)), 1e-300);
      Index start = 0;
      while (start < n) {
        Index stop = start + 1;
        while (stop < n && es.d(stop) - es.d(stop - 1) <= 1e-8 * dscale) ++stop;
        const Index len = stop - start;
        if (len > 1) {
          Eigen::SelfAdjointEigenSolver<Matrix> sub(b.block(start, start, len, len));
          p.middleCols(start, len) = p.middleCols(start, len) * sub.eigenvectors();
          delta.segment(start, len) = sub.eigenvalues();
        } else {
          delta(start) = b(start, start);
        }
        start = stop;
      }
      const Matrix xp = p.transpose() * x.m() * p;
      Matrix out(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          out(i, j) = std::sqrt((delta(i) + delta(j)) / (es.d(i) + es.d(j))) * xp(i, j);
      return SymMatrix(p * out * p.transpose());
    }
    case MetricKind::Bkm:
      bkm_unsupported("parallel_transport");
    case MetricKind::PolarAffine: {
      const MetricId ai{MetricKind::AffineInvariant, id.ab};
      const SymMatrix carried =
          parallel_transport(ai, SpdMatrix(sigma.m() * sigma.m()),
                             SpdMatrix(lambda.m() * lambda.m()), dpow2(sigma, x));
      return sylvester_lift(lambda, carried);
    }
  }
  throw std::logic_error("unreachable");
}

SymMatrix ai_basis_vector(const MetricId& id, const SpdMatrix& sigma, Index k) {
  const Index n = sigma.dim();
  const STParams p = id.st(n);
  const double pp = std::sqrt((p.alpha + static_cast<double>(n) * p.beta) / p.alpha);
  Matrix eb = sym_basis_matrix(n, k);
  if (k < n) {  // diagonal basis elements carry the trace correction
    eb.diagonal().array() -= (pp - 1.0) / (static_cast<double>(n) * pp);
  }
  const Matrix rt = spd_sqrt(sigma).m();
  return SymMatrix(rt * eb * rt);
}

double bkm_metric(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) {
  return (x.m() * bkm_g(sigma, y).m()).trace();
}

double bkm_m2(double x, double y) {
  static const UnivariateFn lg = fn_log();
  return divided_difference(lg, x, y);
}

double bkm_m3(double x, double y, double z) {
  static const UnivariateFn lg = fn_log();
  return -divided_difference2(lg, x, y, z);
}

SymMatrix bkm_g(const SpdMatrix& sigma, const SymMatrix& x) {
  return univariate_diff(fn_log(), sigma, x);
}

SymMatrix bkm_dg(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) {
  return univariate_diff2(fn_log(), sigma, x, y);
}

SymMatrix bkm_connection(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                         const SymMatrix& dy) {
  return SymMatrix(dy.m() + 0.5 * dlog_inverse(sigma, bkm_dg(sigma, x, y)).m());
}

SymMatrix bkm_riemann(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                      const SymMatrix& z) {
  const SymMatrix gyz = dlog_inverse(sigma, bkm_dg(sigma, y, z));
  const SymMatrix gxz = dlog_inverse(sigma, bkm_dg(sigma, x, z));
  const SymMatrix first = dlog_inverse(sigma, bkm_dg(sigma, x, gyz));
  const SymMatrix second = dlog_inverse(sigma, bkm_dg(sigma, y, gxz));
  return SymMatrix(-0.25 * first.m() + 0.25 * second.m());
}

BwQuotientReport bw_quotient_check(const Matrix& a, const SymMatrix& x) {
  const Index n = a.rows();
  if (a.rows() != a.cols())
    throw std::invalid_argument("bw_quotient_check: square matrix required");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw std::domain_error("bw_quotient_check: fiber point is singular");
  const Matrix a_invt = lu.inverse().transpose();

  const SpdMatrix sigma(a * a.transpose());
  const SymMatrix x0 = sylvester_lift(sigma, x);
  const Matrix xh = x0.m() * a;

  BwQuotientReport rep;
  const Matrix dpi = xh * a.transpose() + a * xh.transpose();
  rep.submersion_residual = (dpi - (sigma.m() * x0.m() + x0.m() * sigma.m())).norm();

  // probe the full bases of Sym(n) and Skew(n)
  for (Index k = 0; k < sym_dim(n); ++k) {
    const Matrix w = sym_basis_matrix(n, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        Matrix s = Matrix::Zero(n, n);
        s(i, j) = 1.0;
        s(j, i) = -1.0;
        const double ip = ((w * a) * (s * a_invt).transpose()).trace();
        rep.orthogonality = std::max(rep.orthogonality, std::abs(ip));
      }
  }
  const double lift_norm = (xh * xh.transpose()).trace();
  rep.lift_norm_residual = std::abs(lift_norm - bw_metric(sigma, x, x));
  return rep;
}

}  // namespace spdgeo
