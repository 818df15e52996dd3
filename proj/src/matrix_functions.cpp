#include "spdgeo/matrix_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spdgeo {

namespace {

void check_domain(const UnivariateFn& f, const Vector& d) {
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > f.domain_lo)) {
      throw std::domain_error("univariate function '" + f.name + "': eigenvalue " +
                              std::to_string(d(i)) + " outside domain");
    }
  }
}

Matrix apply_in_basis(const EigenDecomp& e, const Matrix& entries) {
  return e.P * entries * e.P.transpose();
}

}  // namespace

UnivariateFn fn_identity() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          -std::numeric_limits<double>::infinity(), "identity"};
}

UnivariateFn fn_log() {
  return {[](double x) { return std::log(x); }, [](double x) { return 1.0 / x; },
          [](double x) { return -1.0 / (x * x); }, 0.0, "log"};
}

UnivariateFn fn_exp() {
  return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
          [](double x) { return std::exp(x); }, -std::numeric_limits<double>::infinity(), "exp"};
}

UnivariateFn fn_pow(double p) {
  return {[p](double x) { return std::pow(x, p); },
          [p](double x) { return p * std::pow(x, p - 1.0); },
          [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); }, 0.0,
          "pow" + std::to_string(p)};
}

UnivariateFn fn_sqrt() { return fn_pow(0.5); }

UnivariateFn fn_exp_shifted() {
  return {[](double x) { return std::exp(x) - 1.0 + x; },
          [](double x) { return std::exp(x) + 1.0; }, [](double x) { return std::exp(x); }, 0.0,
          "exp_shifted"};
}

EigenDecomp eigh(const SymMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma.m());
  if (solver.info() != Eigen::Success) {
    throw convergence_error("eigendecomposition did not converge within " +
                            std::to_string(30 * sigma.dim()) + " iterations (n=" +
                            std::to_string(sigma.dim()) + ")");
  }
  EigenDecomp e{solver.eigenvectors(), solver.eigenvalues()};
  const Index n = sigma.dim();
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

double divided_difference(const UnivariateFn& f, double x, double y) {
  const double scale = std::max(std::abs(x), std::abs(y));
  if (std::abs(x - y) > kDividedDiffSwitch * scale) {
    return (f.f(x) - f.f(y)) / (x - y);
  }
  return f.df(0.5 * (x + y));
}

double divided_difference2(const UnivariateFn& f, double x, double y, double z) {
  double a = x, b = y, c = z;
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  const double scale = std::max({std::abs(a), std::abs(c), 1e-300});

  auto second = [&](double t) {
    if (f.d2f) return f.d2f(t);
    // central difference fallback when no analytic second derivative is supplied
    const double h = 1e-5 * std::max(std::abs(t), 1.0);
    return (f.df(t + h) - f.df(t - h)) / (2.0 * h);
  };

  if (c - a < kSecondDiffSwitch * scale) {
    return 0.5 * second((a + b + c) / 3.0);
  }
  if (b - a < kSecondDiffSwitch * scale) {
    // two close arguments at m, one far at c: (f'(m) - f[m,c]) / (m - c)
    const double m = 0.5 * (a + b);
    return (f.df(m) - (f.f(m) - f.f(c)) / (m - c)) / (m - c);
  }
  if (c - b < kSecondDiffSwitch * scale) {
    const double m = 0.5 * (b + c);
    return (f.df(m) - (f.f(m) - f.f(a)) / (m - a)) / (m - a);
  }
  const double fab = (f.f(a) - f.f(b)) / (a - b);
  const double fbc = (f.f(b) - f.f(c)) / (b - c);
  return (fab - fbc) / (a - c);
}

namespace {

SymMatrix apply_impl(const UnivariateFn& f, const EigenDecomp& e) {
  check_domain(f, e.d);
  Vector fd(e.d.size());
  for (Index i = 0; i < e.d.size(); ++i) fd(i) = f.f(e.d(i));
  return SymMatrix(e.P * fd.asDiagonal() * e.P.transpose());
}

SymMatrix diff_impl(const UnivariateFn& f, const EigenDecomp& e, const SymMatrix& x) {
  check_domain(f, e.d);
  const Index n = e.d.size();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = divided_difference(f, e.d(i), e.d(j)) * xp(i, j);
  return SymMatrix(apply_in_basis(e, out));
}

}  // namespace

SymMatrix univariate_apply(const UnivariateFn& f, const SpdMatrix& sigma) {
  return apply_impl(f, sigma.eig());
}

SymMatrix univariate_apply_sym(const UnivariateFn& f, const SymMatrix& s) {
  return apply_impl(f, eigh(s));
}

SymMatrix univariate_diff(const UnivariateFn& f, const SpdMatrix& sigma, const SymMatrix& x) {
  return diff_impl(f, sigma.eig(), x);
}

SymMatrix univariate_diff_sym(const UnivariateFn& f, const SymMatrix& s, const SymMatrix& x) {
  return diff_impl(f, eigh(s), x);
}

SymMatrix univariate_diff2(const UnivariateFn& f, const SpdMatrix& sigma, const SymMatrix& x,
                           const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  check_domain(f, e.d);
  const Index n = e.d.size();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index k = 0; k < n; ++k) {
        s += divided_difference2(f, e.d(i), e.d(k), e.d(j)) *
             (xp(i, k) * yp(k, j) + yp(i, k) * xp(k, j));
      }
      out(i, j) = s;
    }
  return SymMatrix(apply_in_basis(e, out));
}

SymMatrix dlog_inverse(const SpdMatrix& sigma, const SymMatrix& w) {
  const EigenDecomp& e = sigma.eig();
  const UnivariateFn lg = fn_log();
  const Index n = e.d.size();
  const Matrix wp = e.P.transpose() * w.m() * e.P;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = wp(i, j) / divided_difference(lg, e.d(i), e.d(j));
  return SymMatrix(apply_in_basis(e, out));
}

SymMatrix sylvester_lift(const SpdMatrix& sigma, const SymMatrix& x) {
  const EigenDecomp& e = sigma.eig();
  const Index n = e.d.size();
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = xp(i, j) / (e.d(i) + e.d(j));
  return SymMatrix(apply_in_basis(e, out));
}

Matrix sqrt_product(const SpdMatrix& sigma, const SpdMatrix& lambda) {
  const SpdMatrix rt = spd_sqrt(sigma);
  const Matrix inner = rt.m() * lambda.m() * rt.m();
  const SpdMatrix inner_rt = spd_sqrt(SpdMatrix(inner));
  Eigen::LLT<Matrix> llt(rt.m());
  // inner_rt * rt^{-1}, using symmetry of both factors
  const Matrix right = llt.solve(inner_rt.m()).transpose();
  return rt.m() * right;
}

SpdMatrix spd_sqrt(const SpdMatrix& sigma) {
  return SpdMatrix(univariate_apply(fn_sqrt(), sigma).m());
}

SpdMatrix spd_inverse(const SpdMatrix& sigma) {
  return SpdMatrix(univariate_apply(fn_pow(-1.0), sigma).m());
}

SpdMatrix spd_exp_sym(const SymMatrix& s) {
  return SpdMatrix(univariate_apply_sym(fn_exp(), s).m());
}

SymMatrix spd_log(const SpdMatrix& sigma) { return univariate_apply(fn_log(), sigma); }

}  // namespace spdgeo
