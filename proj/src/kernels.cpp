#include "spdgeo/kernels.hpp"

#include <cmath>

namespace spdgeo {

KernelSpec MeanKernelSpec::to_kernel() const {
  const double aa = a;
  const double th = theta;
  const BivariateFn mm = m;
  return {[aa, th, mm](double x, double y) { return aa * std::pow(mm(x, y), th); },
          mean_name + "^" + std::to_string(theta),
          {}};
}

BostSpec::BostSpec(KernelSpec k, double a, double b, Index dim)
    : phi(std::move(k)), alpha(a), beta(b), n(dim) {
  if (n < 1) throw std::invalid_argument("BostSpec: dimension must be positive");
  if (!(alpha > 0.0) || !(alpha + static_cast<double>(n) * beta > 0.0)) {
    throw std::domain_error("BostSpec: require alpha > 0 and alpha + n*beta > 0");
  }
}

double log_mean(double x, double y) {
  static const UnivariateFn lg = fn_log();
  return 1.0 / divided_difference(lg, x, y);
}

BivariateFn builtin_mean(const std::string& name) {
  if (name == "arithmetic") return [](double x, double y) { return 0.5 * (x + y); };
  if (name == "geometric") return [](double x, double y) { return std::sqrt(x * y); };
  if (name == "harmonic") return [](double x, double y) { return 2.0 * x * y / (x + y); };
  if (name == "logarithmic") return [](double x, double y) { return log_mean(x, y); };
  throw std::invalid_argument("unknown mean '" + name + "'");
}

namespace {

// d/dx of the logarithmic mean: -L(x,y)^2 * log^[2](x, x, y)
double dlog_mean1(double x, double y) {
  static const UnivariateFn lg = fn_log();
  const double l = log_mean(x, y);
  return -l * l * divided_difference2(lg, x, x, y);
}

}  // namespace

KernelSpec builtin_kernel(const std::string& name) {
  if (name == "euclidean") {
    return {[](double, double) { return 1.0; }, name, [](double, double) { return 0.0; }};
  }
  if (name == "log_euclidean") {
    return {[](double x, double y) {
              const double l = log_mean(x, y);
              return l * l;
            },
            name,
            [](double x, double y) { return 2.0 * log_mean(x, y) * dlog_mean1(x, y); }};
  }
  if (name == "affine_invariant") {
    return {[](double x, double y) { return x * y; }, name, [](double, double y) { return y; }};
  }
  if (name == "polar_affine") {
    return {[](double x, double y) {
              const double h = 2.0 * x * y / (x + y);
              return h * h;
            },
            name,
            [](double x, double y) {
              const double s = x + y;
              return 8.0 * x * y * y * y / (s * s * s);
            }};
  }
  if (name == "bures_wasserstein") {
    return {[](double x, double y) { return 2.0 * (x + y); }, name,
            [](double, double) { return 2.0; }};
  }
  if (name == "bkm") {
    return {[](double x, double y) { return log_mean(x, y); }, name,
            [](double x, double y) { return dlog_mean1(x, y); }};
  }
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

double bod_eval(const KernelSpec& k, const SpdMatrix& sigma, const SymMatrix& x,
                const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) acc += xp(i, j) * yp(i, j) / k.phi(e.d(i), e.d(j));
  return acc;
}

SymMatrix psi_apply(const KernelSpec& k, const SpdMatrix& sigma, const SymMatrix& x) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = xp(i, j) / std::sqrt(k.phi(e.d(i), e.d(j)));
  return SymMatrix(e.P * out * e.P.transpose());
}

double bost_eval(const BostSpec& b, const SpdMatrix& sigma, const SymMatrix& x,
                 const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  double frob = 0.0, trx = 0.0, try_ = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double psi_ii = 1.0 / std::sqrt(b.phi.phi(e.d(i), e.d(i)));
    trx += psi_ii * xp(i, i);
    try_ += psi_ii * yp(i, i);
    for (Index j = 0; j < n; ++j) frob += xp(i, j) * yp(i, j) / b.phi.phi(e.d(i), e.d(j));
  }
  return b.alpha * frob + b.beta * trx * try_;
}

KernelSpec bod_cometric(const KernelSpec& k) {
  const BivariateFn phi = k.phi;
  KernelSpec dual{[phi](double x, double y) { return 1.0 / phi(x, y); }, "dual(" + k.name + ")",
                  {}};
  if (k.dphi1) {
    const BivariateFn d1 = k.dphi1;
    dual.dphi1 = [phi, d1](double x, double y) {
      const double p = phi(x, y);
      return -d1(x, y) / (p * p);
    };
  }
  return dual;
}

BostSpec bost_cometric(const BostSpec& b) {
  const double nd = static_cast<double>(b.n);
  return BostSpec(bod_cometric(b.phi), 1.0 / b.alpha, -b.beta / (b.alpha * (b.alpha + nd * b.beta)),
                  b.n);
}

KernelSpec pullback_kernel(const KernelSpec& k, const UnivariateFn& f) {
  // reject non-monotone maps up front
  double prev = f.f(1e-3);
  int sign = 0;
  for (double t = 2e-3; t < 1e3; t *= 1.6) {
    const double cur = f.f(t);
    const int s = cur > prev ? 1 : (cur < prev ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw std::domain_error("pullback_kernel: '" + f.name +
                              "' is not monotone on the sampled domain");
    }
    sign = s;
    prev = cur;
  }
  const BivariateFn phi = k.phi;
  const UnivariateFn ff = f;
  KernelSpec out{[phi, ff](double x, double y) {
                   const double dd = divided_difference(ff, x, y);
                   return phi(ff.f(x), ff.f(y)) / (dd * dd);
                 },
                 k.name + "*" + f.name,
                 {}};
  if (k.dphi1 && f.d2f) {
    const BivariateFn d1 = k.dphi1;
    out.dphi1 = [phi, d1, ff](double x, double y) {
      const double dd = divided_difference(ff, x, y);
      const double fx = ff.f(x), fy = ff.f(y);
      return d1(fx, fy) * ff.df(x) / (dd * dd) -
             2.0 * phi(fx, fy) * divided_difference2(ff, x, x, y) / (dd * dd * dd);
    };
  }
  return out;
}

KernelSpec convex_combine(const KernelSpec& k1, const KernelSpec& k2, double t) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("convex_combine: t must lie in [0, 1]");
  const BivariateFn p1 = k1.phi, p2 = k2.phi;
  KernelSpec out{[p1, p2, t](double x, double y) {
                   const double a = p1(x, y), b = p2(x, y);
                   return a * b / ((1.0 - t) * b + t * a);
                 },
                 "mix(" + k1.name + "," + k2.name + ")",
                 {}};
  if (k1.dphi1 && k2.dphi1) {
    const BivariateFn d1 = k1.dphi1, d2 = k2.dphi1;
    out.dphi1 = [p1, p2, d1, d2, t](double x, double y) {
      const double a = p1(x, y), b = p2(x, y);
      const double da = d1(x, y), db = d2(x, y);
      const double den = (1.0 - t) * b + t * a;
      return ((da * b + a * db) * den - a * b * ((1.0 - t) * db + t * da)) / (den * den);
    };
  }
  return out;
}

CompletenessVerdict completeness_power(const MeanKernelSpec& mk, Index n) {
  CompletenessVerdict v{};
  v.complete = (mk.theta == 2.0);
  // Length of s -> s*I from s=1e-8 to 1; speed sqrt(n / phi(s, s)).
  // Substituting s = e^u makes the integrand smooth for power-law weights.
  const KernelSpec k = mk.to_kernel();
  const double u_lo = std::log(1e-8), u_hi = 0.0;
  const int steps = 4000;  // composite Simpson, even count
  const double h = (u_hi - u_lo) / steps;
  auto integrand = [&](double u) {
    const double s = std::exp(u);
    return s * std::sqrt(static_cast<double>(n) / k.phi(s, s));
  };
  double acc = integrand(u_lo) + integrand(u_hi);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(u_lo + i * h);
  v.witness_length = acc * h / 3.0;
  v.witness_diverged = v.witness_length > 10.0;
  return v;
}

namespace {

struct SeparableVectors {
  Vector x, y;
  Vector delta;  // psi(d_i, d_i)
};

SeparableVectors separable_vectors(const SeparableSpec& s, const Vector& d) {
  const Index n = d.size();
  SeparableVectors sv{Vector(n), Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    sv.delta(i) = s.psi(d(i), d(i));
    if (!(sv.delta(i) > 0.0)) {
      throw std::domain_error("separable spec: psi must be positive on the diagonal");
    }
    sv.x(i) = s.psi1(d(i)) / sv.delta(i);
    sv.y(i) = s.psi2(d(i)) / sv.delta(i);
  }
  return sv;
}

}  // namespace

double separable_eval(const SeparableSpec& s, const SpdMatrix& sigma, const SymMatrix& x,
                      const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  double frob = 0.0;
  double t1x = 0.0, t2x = 0.0, t1y = 0.0, t2y = 0.0;
  for (Index i = 0; i < n; ++i) {
    t1x += s.psi1(e.d(i)) * xp(i, i);
    t2x += s.psi2(e.d(i)) * xp(i, i);
    t1y += s.psi1(e.d(i)) * yp(i, i);
    t2y += s.psi2(e.d(i)) * yp(i, i);
    for (Index j = 0; j < n; ++j) {
      const double w = s.psi(e.d(i), e.d(j));
      frob += w * w * xp(i, j) * yp(i, j);
    }
  }
  return frob + 0.5 * (t1x * t2y + t1y * t2x);
}

Matrix separable_s_matrix(const SeparableSpec& s, const Vector& d) {
  const SeparableVectors sv = separable_vectors(s, d);
  const Index n = d.size();
  Matrix core = Matrix::Identity(n, n) +
                0.5 * (sv.x * sv.y.transpose() + sv.y * sv.x.transpose());
  return sv.delta.asDiagonal() * core * sv.delta.asDiagonal();
}

SeparableCometric separable_cometric(const SeparableSpec& s, const Vector& d) {
  const SeparableVectors sv = separable_vectors(s, d);
  const Index n = d.size();
  const double sxy = sv.x.dot(sv.y);
  const double nx = sv.x.norm(), ny = sv.y.norm();
  if (!(nx * ny - sxy < 2.0)) {
    throw std::domain_error("separable spec: positivity condition ||x||||y|| - <x,y> < 2 fails");
  }
  const double c = 1.0 + sxy - 0.25 * (nx * nx * ny * ny - sxy * sxy);
  if (!(c > 0.0)) throw std::domain_error("separable spec: invalid (c <= 0)");

  const Matrix mcross = sv.x * sv.y.transpose() + sv.y * sv.x.transpose();
  const Matrix nmat = ny * ny * (sv.x * sv.x.transpose()) + nx * nx * (sv.y * sv.y.transpose());
  const Matrix core =
      Matrix::Identity(n, n) - (2.0 + sxy) / (4.0 * c) * mcross + 1.0 / (4.0 * c) * nmat;
  const Vector idelta = sv.delta.cwiseInverse();
  Matrix sinv = idelta.asDiagonal() * core * idelta.asDiagonal();

  // Dual spec: weight 1/psi plus trace-term maps from the rank-2 factorization
  // of the correction, with the scalar coefficients frozen at this d.
  const BivariateFn psi = s.psi;
  const ScalarFn psi1 = s.psi1, psi2 = s.psi2;
  BivariateFn dual_psi = [psi](double u, double v) { return 1.0 / psi(u, v); };
  ScalarFn dual1, dual2;
  if (ny < 1e-14 * std::max(1.0, nx)) {
    dual1 = [](double) { return 0.0; };
    dual2 = [](double) { return 0.0; };
  } else {
    const double disc = std::sqrt((2.0 + sxy + nx * ny) * (2.0 + sxy - nx * ny));
    const double lam = (2.0 + sxy + disc) / (ny * ny);
    const double mu = (2.0 + sxy - disc) / (ny * ny);
    const double A = ny, B = -lam * ny, C = ny, D = -mu * ny;
    // x'(t) = (A x(t) + B y(t)) / (4c), y'(t) = C x(t) + D y(t), expressed as
    // scalar maps; dual trace maps are x'(t)/psi(t,t) and y'(t)/psi(t,t).
    dual1 = [psi, psi1, psi2, A, B, c](double t) {
      const double de = psi(t, t);
      const double xt = psi1(t) / de, yt = psi2(t) / de;
      return (A * xt + B * yt) / (4.0 * c) / de;
    };
    dual2 = [psi, psi1, psi2, C, D](double t) {
      const double de = psi(t, t);
      const double xt = psi1(t) / de, yt = psi2(t) / de;
      return (C * xt + D * yt) / de;
    };
  }
  return SeparableCometric{std::move(sinv),
                           SeparableSpec{std::move(dual_psi), std::move(dual1), std::move(dual2),
                                         "dual(" + s.name + ")"}};
}

}  // namespace spdgeo
