#include "spdgeo/invariant_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace spdgeo {

namespace {

// Argument vector with entries i (and j) moved to the front, tail order preserved.
Vector lead_pair(const Vector& d, Index i, Index j) {
  const Index n = d.size();
  Vector v(n);
  v(0) = d(i);
  v(1) = d(j);
  Index k = 2;
  for (Index m = 0; m < n; ++m) {
    if (m != i && m != j) v(k++) = d(m);
  }
  return v;
}

Vector lead_one(const Vector& d, Index i) {
  const Index n = d.size();
  Vector v(n);
  v(0) = d(i);
  Index k = 1;
  for (Index m = 0; m < n; ++m) {
    if (m != i) v(k++) = d(m);
  }
  return v;
}

double rel_dev(double got, double want) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-300});
}

}  // namespace

MetricTriple frobenius_triple(Index n) {
  return {n, [](const Vector&) { return 1.0; }, [](const Vector&) { return 0.0; },
          [](const Vector&) { return 1.0; }, "frobenius"};
}

MetricTriple triple_from_kernel(const KernelSpec& k, Index n) {
  const BivariateFn phi = k.phi;
  return {n, [phi](const Vector& v) { return 1.0 / phi(v(0), v(1)); },
          [](const Vector&) { return 0.0; },
          [phi](const Vector& v) { return 1.0 / phi(v(0), v(0)); }, k.name};
}

MetricTriple triple_from_bost(const BostSpec& b) {
  const BivariateFn phi = b.phi.phi;
  const double a = b.alpha, bb = b.beta;
  return {b.n, [phi, a](const Vector& v) { return a / phi(v(0), v(1)); },
          [phi, bb](const Vector& v) {
            return bb / std::sqrt(phi(v(0), v(0)) * phi(v(1), v(1)));
          },
          [phi, a, bb](const Vector& v) { return (a + bb) / phi(v(0), v(0)); },
          "bost(" + b.phi.name + ")"};
}

MetricTriple triple_from_separable(const SeparableSpec& s, Index n) {
  const BivariateFn psi = s.psi;
  const ScalarFn p1 = s.psi1, p2 = s.psi2;
  return {n,
          [psi](const Vector& v) {
            const double w = psi(v(0), v(1));
            return w * w;
          },
          [p1, p2](const Vector& v) {
            return 0.5 * (p1(v(0)) * p2(v(1)) + p1(v(1)) * p2(v(0)));
          },
          [psi, p1, p2](const Vector& v) {
            const double w = psi(v(0), v(0));
            return w * w + p1(v(0)) * p2(v(0));
          },
          "separable(" + s.name + ")"};
}

SMatrix s_matrix(const MetricTriple& t, const Vector& d) {
  const Index n = d.size();
  Matrix S(n, n);
  for (Index i = 0; i < n; ++i) {
    S(i, i) = t.gamma(lead_one(d, i));
    for (Index j = i + 1; j < n; ++j) {
      S(i, j) = S(j, i) = t.beta(lead_pair(d, i, j));
    }
  }
  return {d, S};
}

double triple_alpha_at(const MetricTriple& t, const Vector& d, Index i, Index j) {
  return t.alpha(lead_pair(d, i, j));
}

std::vector<Vector> validation_grid(const GridSpec& g) {
  std::vector<Vector> pts;
  const Index n = g.n;
  if (n >= 2 && n <= 4) {
    const std::vector<double> axis{0.1, 0.5, 1.0, 2.0, 10.0};
    std::vector<Index> idx(n, 0);
    while (true) {
      Vector v(n);
      for (Index i = 0; i < n; ++i) v(i) = axis[idx[i]];
      pts.push_back(v);
      Index k = 0;
      while (k < n && ++idx[k] == static_cast<Index>(axis.size())) idx[k++] = 0;
      if (k == n) break;
    }
  }
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unif(std::log(g.lo), std::log(g.hi));
  for (int r = 0; r < g.random_points; ++r) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = std::exp(unif(rng));
    pts.push_back(v);
  }
  // forced slices with equal leading pair
  const size_t base = pts.size();
  for (size_t k = 0; k < base; ++k) {
    Vector v = pts[k];
    v(1) = v(0);
    pts.push_back(v);
  }
  return pts;
}

bool ValidationReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return true;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : conditions) {
    os << c.name << " " << (c.pass ? "PASS" : "FAIL") << " magnitude=" << c.magnitude
       << " worst=[";
    for (Index i = 0; i < c.worst_sample.size(); ++i) {
      if (i) os << " ";
      os << c.worst_sample(i);
    }
    os << "]\n";
  }
  return os.str();
}

ValidationReport validate_triple(const MetricTriple& t, const GridSpec& grid) {
  if (grid.n != t.n) throw std::invalid_argument("validate_triple: grid dimension mismatch");
  const std::vector<Vector> pts = validation_grid(grid);
  if (pts.empty()) throw std::invalid_argument("validate_triple: empty grid");

  ConditionReport compat{"compatibility", true, pts.front(), 0.0};
  ConditionReport posit{"positivity", true, pts.front(), 0.0};
  ConditionReport symm{"symmetry", true, pts.front(), 0.0};

  std::mt19937_64 rng(grid.seed ^ 0x5bd1e995ULL);
  const Index n = t.n;

  for (const Vector& d : pts) {
    // compatibility on the equal-pair slice, measured against alpha + beta
    if (d(0) == d(1)) {
      const double g = t.gamma(d);
      const double ab = t.alpha(d) + t.beta(d);
      const double dev = std::abs(g - ab) / std::max(std::abs(ab), 1e-12);
      if (dev > compat.magnitude) {
        compat.magnitude = dev;
        compat.worst_sample = d;
      }
    }
    // positivity: S(d) positive definite, off-diagonal weights positive
    const SMatrix sm = s_matrix(t, d);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sm.S, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) lo = std::min(lo, triple_alpha_at(t, d, i, j));
    if (!(lo > 0.0)) {
      const double viol = -lo;
      if (!posit.pass || viol >= posit.magnitude) {
        posit.magnitude = viol;
        posit.worst_sample = d;
      }
      posit.pass = false;
    }
    // symmetry by explicit permutation evaluation
    auto update_symm = [&](double got, double want, const Vector& at) {
      const double dev = rel_dev(got, want);
      if (dev > symm.magnitude) {
        symm.magnitude = dev;
        symm.worst_sample = at;
      }
    };
    Vector swapped = d;
    std::swap(swapped(0), swapped(1));
    update_symm(t.alpha(swapped), t.alpha(d), d);
    update_symm(t.beta(swapped), t.beta(d), d);
    if (n > 2) {
      Vector tail_a = d, tail_g = d;
      std::vector<Index> perm(n - 2);
      for (Index i = 0; i < n - 2; ++i) perm[i] = i + 2;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (Index i = 0; i < n - 2; ++i) tail_a(i + 2) = d(perm[i]);
      update_symm(t.alpha(tail_a), t.alpha(d), d);
      update_symm(t.beta(tail_a), t.beta(d), d);
      std::vector<Index> permg(n - 1);
      for (Index i = 0; i < n - 1; ++i) permg[i] = i + 1;
      std::shuffle(permg.begin(), permg.end(), rng);
      for (Index i = 0; i < n - 1; ++i) tail_g(i + 1) = d(permg[i]);
      update_symm(t.gamma(tail_g), t.gamma(d), d);
    } else {
      update_symm(t.gamma(lead_one(d, 0)), t.gamma(d), d);
    }
  }
  compat.pass = compat.magnitude <= 1e-9;
  symm.pass = symm.magnitude <= 1e-9;

  ValidationReport rep;
  rep.conditions = {compat, posit, symm};
  return rep;
}

double metric_eval(const MetricTriple& t, const SpdMatrix& sigma, const SymMatrix& x,
                   const SymMatrix& y) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  if (n != t.n) throw std::invalid_argument("metric_eval: dimension mismatch");
  const Matrix xp = e.P.transpose() * x.m() * e.P;
  const Matrix yp = e.P.transpose() * y.m() * e.P;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc += t.gamma(lead_one(e.d, i)) * xp(i, i) * yp(i, i);
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector v = lead_pair(e.d, i, j);
      acc += t.alpha(v) * xp(i, j) * yp(i, j);
      acc += t.beta(v) * xp(i, i) * yp(j, j);
    }
  }
  return acc;
}

double cometric_eval(const MetricTriple& t, const SpdMatrix& sigma, const SymMatrix& w,
                     const SymMatrix& w2) {
  const EigenDecomp& e = sigma.eig();
  const Index n = sigma.dim();
  if (n != t.n) throw std::invalid_argument("cometric_eval: dimension mismatch");
  const Matrix wp = e.P.transpose() * w.m() * e.P;
  const Matrix wp2 = e.P.transpose() * w2.m() * e.P;
  const SMatrix sm = s_matrix(t, e.d);
  Eigen::LDLT<Matrix> ldlt(sm.S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::domain_error("cometric_eval: diagonal block S(d) is numerically singular");
  }
  const Matrix sinv = ldlt.solve(Matrix::Identity(n, n));
  const double rcond_proxy = ldlt.vectorD().minCoeff() / ldlt.vectorD().maxCoeff();
  if (!(rcond_proxy > 1e-14)) {
    throw std::domain_error("cometric_eval: diagonal block S(d) is ill-conditioned");
  }
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) acc += wp(i, j) * wp2(i, j) / t.alpha(lead_pair(e.d, i, j));
      acc += sinv(i, j) * wp(i, i) * wp2(j, j);
    }
  }
  return acc;
}

MetricTriple pullback_triple(const MetricTriple& t, const UnivariateFn& f, bool check_diffeo) {
  if (check_diffeo) {
    int sign = 0;
    for (double s = 1e-3; s < 1e3; s *= 1.6) {
      const double d = f.df(s);
      const int cur = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
      if (cur == 0 || (sign != 0 && cur != sign)) {
        throw std::domain_error("pullback_triple: derivative of '" + f.name +
                                "' vanishes or changes sign on the sampled domain");
      }
      sign = cur;
    }
  }
  const MultivariateFn a = t.alpha, b = t.beta, g = t.gamma;
  const UnivariateFn ff = f;
  auto mapped = [ff](const Vector& v) {
    Vector w(v.size());
    for (Index i = 0; i < v.size(); ++i) w(i) = ff.f(v(i));
    return w;
  };
  return {t.n,
          [a, ff, mapped](const Vector& v) {
            const double dd = divided_difference(ff, v(0), v(1));
            return a(mapped(v)) * dd * dd;
          },
          [b, ff, mapped](const Vector& v) { return b(mapped(v)) * ff.df(v(0)) * ff.df(v(1)); },
          [g, ff, mapped](const Vector& v) {
            const double dp = ff.df(v(0));
            return g(mapped(v)) * dp * dp;
          },
          t.name + "*" + f.name};
}

InvarianceReport scaling_invariance_check(const MetricTriple& t,
                                          const std::vector<Vector>& samples) {
  InvarianceReport rep;
  rep.worst_sample = samples.empty() ? Vector() : samples.front();
  const std::vector<double> lambdas{0.5, 2.0, 3.7};
  for (const Vector& d : samples) {
    for (double lam : lambdas) {
      const Vector ld = lam * d;
      const double s = 1.0 / (lam * lam);
      for (const MultivariateFn* f : {&t.alpha, &t.beta, &t.gamma}) {
        const double want = s * (*f)(d);
        const double got = (*f)(ld);
        const double dev = std::abs(got - want) /
                           std::max({std::abs(want), std::abs(got), 1e-12});
        if (dev > rep.max_rel_dev) {
          rep.max_rel_dev = dev;
          rep.worst_sample = d;
        }
      }
    }
  }
  return rep;
}

InvarianceReport inversion_invariance_check(const MetricTriple& t,
                                            const std::vector<Vector>& samples) {
  InvarianceReport rep;
  rep.worst_sample = samples.empty() ? Vector() : samples.front();
  for (const Vector& d : samples) {
    const Vector inv = d.cwiseInverse();
    const double d0 = d(0), d1 = d(1);
    auto update = [&](double got, double want) {
      const double dev =
          std::abs(got - want) / std::max({std::abs(want), std::abs(got), 1e-12});
      if (dev > rep.max_rel_dev) {
        rep.max_rel_dev = dev;
        rep.worst_sample = d;
      }
    };
    update(t.gamma(inv), std::pow(d0, 4) * t.gamma(d));
    update(t.alpha(inv), d0 * d0 * d1 * d1 * t.alpha(d));
    update(t.beta(inv), d0 * d0 * d1 * d1 * t.beta(d));
  }
  return rep;
}

ContinuityBounds eig_continuity_bounds(const SpdMatrix& sigma, const SpdMatrix& lambda) {
  ContinuityBounds out;
  const EigenDecomp& es = sigma.eig();
  const EigenDecomp& el = lambda.eig();
  const Index n = sigma.dim();
  out.dist_eigs = (es.d - el.d).norm();
  out.dist_mats = (sigma.m() - lambda.m()).norm();
  out.eig_bound_holds = out.dist_eigs <= out.dist_mats * (1.0 + 1e-12) + 1e-14;

  double min_gap2 = std::numeric_limits<double>::infinity();
  const double scale = std::max(std::abs(es.d(n - 1)), 1e-300);
  bool distinct = true;
  for (Index i = 0; i + 1 < n; ++i) {
    const double gap = es.d(i + 1) - es.d(i);
    if (gap / scale <= kSpacingEngage) distinct = false;
    min_gap2 = std::min(min_gap2, gap * gap);
  }
  if (!distinct) {
    out.eigvec_engaged = false;
    return out;
  }
  out.eigvec_engaged = true;

  // Align a diagonalizer of sigma: with distinct eigenvalues the block
  // diagonal of U = P0^T Q is scalar, so the polar factor is a sign flip.
  const Matrix u = es.P.transpose() * el.P;
  Matrix p = es.P;
  for (Index k = 0; k < n; ++k) {
    if (u(k, k) < 0.0) p.col(k) = -p.col(k);
  }
  out.eigvec_lhs = (p - el.P).squaredNorm();
  out.eigvec_rhs = 4.0 * std::sqrt(static_cast<double>(n) / min_gap2) * out.dist_mats;
  out.eigvec_bound_holds = out.eigvec_lhs <= out.eigvec_rhs * (1.0 + 1e-12) + 1e-14;
  return out;
}

}  // namespace spdgeo
