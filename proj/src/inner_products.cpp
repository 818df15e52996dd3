#include "spdgeo/inner_products.hpp"

#include <cmath>

namespace spdgeo {

STParams::STParams(double a, double b, Index dim) : alpha(a), beta(b), n(dim) {
  if (n < 1) throw std::invalid_argument("STParams: dimension must be positive");
  if (!(std::min(alpha, alpha + static_cast<double>(n) * beta) > 0.0)) {
    throw std::domain_error("STParams: require min(alpha, alpha + n*beta) > 0");
  }
}

static void check_dims(const SymMatrix& x, const SymMatrix& y, Index n) {
  if (x.dim() != n || y.dim() != n) throw std::invalid_argument("inner product: dimension mismatch");
}

double onp_inner(const STParams& p, const SymMatrix& x, const SymMatrix& y) {
  check_dims(x, y, p.n);
  return p.alpha * (x.m() * y.m()).trace() + p.beta * x.m().trace() * y.m().trace();
}

SymMatrix fpq_map(const STParams& p, const SymMatrix& x) {
  if (x.dim() != p.n) throw std::invalid_argument("fpq_map: dimension mismatch");
  const double pp = std::sqrt(p.alpha + static_cast<double>(p.n) * p.beta);
  const double q = std::sqrt(p.alpha);
  Matrix out = q * x.m();
  out.diagonal().array() += (pp - q) / static_cast<double>(p.n) * x.m().trace();
  return SymMatrix(out);
}

DpmInnerSpec::DpmInnerSpec(const Matrix& a, const SpdMatrix& s) : alpha_ij(a), S(s) {
  const Index n = S.dim();
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("DpmInnerSpec: size mismatch");
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(a(i, j) > 0.0) || a(i, j) != a(j, i)) {
        throw std::domain_error("DpmInnerSpec: off-diagonal weights must be symmetric positive");
      }
    }
}

double dpm_inner(const DpmInnerSpec& spec, const SymMatrix& x, const SymMatrix& y) {
  const Index n = spec.S.dim();
  check_dims(x, y, n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i != j) acc += spec.alpha_ij(i, j) * x(i, j) * y(i, j);
      acc += spec.S(i, j) * x(i, i) * y(j, j);
    }
  return acc;
}

SpmInnerSpec::SpmInnerSpec(double a, double b, double g, Index dim)
    : alpha(a), beta(b), gamma(g), n(dim) {
  if (n < 1) throw std::invalid_argument("SpmInnerSpec: dimension must be positive");
  if (!(alpha > 0.0) || !(gamma > beta) || !(gamma + (n - 1) * beta > 0.0)) {
    throw std::domain_error(
        "SpmInnerSpec: require alpha > 0, gamma > beta, gamma + (n-1)*beta > 0");
  }
}

double spm_inner(const SpmInnerSpec& spec, const SymMatrix& x, const SymMatrix& y) {
  check_dims(x, y, spec.n);
  double diag = 0.0, off = 0.0, cross = 0.0;
  for (Index i = 0; i < spec.n; ++i) {
    diag += x(i, i) * y(i, i);
    for (Index j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      off += x(i, j) * y(i, j);
      cross += x(i, i) * y(j, j);
    }
  }
  return spec.gamma * diag + spec.alpha * off + spec.beta * cross;
}

}  // namespace spdgeo
