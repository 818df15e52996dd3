#include "spdgeo/metric_model.hpp"

#include <cmath>
#include <vector>

namespace spdgeo {

namespace {

// Basis matrices expressed in the eigenbasis of sigma, one n x n slab per
// coordinate of Sym(n).
std::vector<Matrix> primed_basis(const SpdMatrix& sigma) {
  const Index n = sigma.dim();
  const Matrix& p = sigma.eig().P;
  std::vector<Matrix> out;
  out.reserve(sym_dim(n));
  for (Index k = 0; k < sym_dim(n); ++k) {
    out.push_back(p.transpose() * sym_basis_matrix(n, k) * p);
  }
  return out;
}

// Gram matrix of sum_{ij} W_ij u'_ij v'_ij + (diag-block coupling via S):
// off-diagonal weights W, diagonal-pair matrix S.
Matrix gram_from_weights(const std::vector<Matrix>& basis, const Matrix& w, const Matrix& s) {
  const Index nb = static_cast<Index>(basis.size());
  const Index n = w.rows();
  Matrix g(nb, nb);
  for (Index a = 0; a < nb; ++a) {
    for (Index b = a; b < nb; ++b) {
      double acc = 0.0;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          if (i != j) acc += w(i, j) * basis[a](i, j) * basis[b](i, j);
          acc += s(i, j) * basis[a](i, i) * basis[b](j, j);
        }
      g(a, b) = g(b, a) = acc;
    }
  }
  return g;
}

class BostModel : public MetricModel {
 public:
  BostModel(BostSpec spec, std::string label, std::optional<MetricId> closed = std::nullopt)
      : spec_(std::move(spec)), label_(std::move(label)), closed_(closed) {}

  Index dim() const override { return spec_.n; }
  std::string name() const override { return label_; }

  double eval(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) const override {
    return bost_eval(spec_, sigma, x, y);
  }

  double coeval(const SpdMatrix& sigma, const SymMatrix& w, const SymMatrix& w2) const override {
    return bost_eval(bost_cometric(spec_), sigma, w, w2);
  }

  Matrix metric_gram(const SpdMatrix& sigma) const override { return gram(spec_, sigma); }

  Matrix cometric_gram(const SpdMatrix& sigma) const override {
    return gram(bost_cometric(spec_), sigma);
  }

  // Exact derivative of the dual Gram. The dual of the trace-extended weight
  // family evaluates as
  //   G*_ab = (1/alpha) sum_ij phi(d_i, d_j) (B_a)_ij (B_b)_ij
  //         + beta* tr(E_a U) tr(E_b U),  U = u(Sigma), u(t) = sqrt(phi(t, t)),
  // so its derivative reduces to slot-wise divided differences of phi plus
  // the univariate differential of u, both cancellation-free.
  Matrix cometric_gram_derivative(const SpdMatrix& sigma, Index l,
                                  double fd_step) const override {
    if (!spec_.phi.dphi1) return MetricModel::cometric_gram_derivative(sigma, l, fd_step);
    const Index n = sigma.dim();
    const Index nb = sym_dim(n);
    const Vector& d = sigma.eig().d;
    const BivariateFn& phi = spec_.phi.phi;
    const BivariateFn& dphi1 = spec_.phi.dphi1;
    const double nd = static_cast<double>(spec_.n);
    const double beta_dual = -spec_.beta / (spec_.alpha * (spec_.alpha + nd * spec_.beta));

    const std::vector<Matrix> basis = primed_basis(sigma);
    const Matrix& vp = basis[l];

    // slot-wise divided difference (phi(x, z) - phi(y, z)) / (x - y)
    auto sdd = [&](Index k, Index a, Index b) {
      const double scale = std::max(std::abs(d(k)), std::abs(d(a)));
      if (std::abs(d(k) - d(a)) > kDividedDiffSwitch * scale) {
        return (phi(d(k), d(b)) - phi(d(a), d(b))) / (d(k) - d(a));
      }
      return dphi1(0.5 * (d(k) + d(a)), d(b));
    };

    // weight map derivative applied to each basis element
    std::vector<Matrix> dphi_map(nb, Matrix::Zero(n, n));
    for (Index e = 0; e < nb; ++e) {
      const Matrix& w = basis[e];
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
          double acc = (dphi1(d(a), d(b)) * vp(a, a) + dphi1(d(b), d(a)) * vp(b, b)) * w(a, b);
          for (Index k = 0; k < n; ++k) {
            if (k != a) acc += sdd(k, a, b) * vp(a, k) * w(k, b);
            if (k != b) acc += sdd(k, b, a) * vp(k, b) * w(a, k);
          }
          dphi_map[e](a, b) = acc;
        }
    }

    // trace factors and their derivatives: u(t) = sqrt(phi(t, t))
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = std::sqrt(phi(d(i), d(i)));
    const UnivariateFn ufn{
        [&phi](double t) { return std::sqrt(phi(t, t)); },
        [&phi, &dphi1](double t) { return dphi1(t, t) / std::sqrt(phi(t, t)); },
        {},
        0.0,
        "trace-weight"};
    Vector tu(nb), dtu(nb);
    for (Index e = 0; e < nb; ++e) {
      double t0 = 0.0, t1 = 0.0;
      for (Index i = 0; i < n; ++i) {
        t0 += u(i) * basis[e](i, i);
        for (Index j = 0; j < n; ++j) {
          t1 += divided_difference(ufn, d(i), d(j)) * vp(i, j) * basis[e](i, j);
        }
      }
      tu(e) = t0;
      dtu(e) = t1;
    }

    Matrix out(nb, nb);
    for (Index a = 0; a < nb; ++a) {
      for (Index b = a; b < nb; ++b) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) acc += basis[a](i, j) * dphi_map[b](i, j);
        acc /= spec_.alpha;
        acc += beta_dual * (dtu(a) * tu(b) + tu(a) * dtu(b));
        out(a, b) = out(b, a) = acc;
      }
    }
    return out;
  }

  bool has_closed_exp() const override { return closed_.has_value(); }

  SpdMatrix closed_exp(const SpdMatrix& sigma, const SymMatrix& x, double t) const override {
    if (!closed_) return MetricModel::closed_exp(sigma, x, t);
    return exp_map(*closed_, sigma, x, t);
  }

 private:
  static Matrix gram(const BostSpec& b, const SpdMatrix& sigma) {
    const Index n = sigma.dim();
    const Vector& d = sigma.eig().d;
    Matrix w(n, n);
    Matrix s(n, n);
    Vector psi_diag(n);
    for (Index i = 0; i < n; ++i) psi_diag(i) = 1.0 / std::sqrt(b.phi.phi(d(i), d(i)));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        w(i, j) = b.alpha / b.phi.phi(d(i), d(j));
        s(i, j) = b.beta * psi_diag(i) * psi_diag(j);
        if (i == j) s(i, j) += b.alpha / b.phi.phi(d(i), d(i));
      }
    return gram_from_weights(primed_basis(sigma), w, s);
  }

  BostSpec spec_;
  std::string label_;
  std::optional<MetricId> closed_;
};

class TripleModel : public MetricModel {
 public:
  explicit TripleModel(MetricTriple t) : t_(std::move(t)) {}

  Index dim() const override { return t_.n; }
  std::string name() const override { return t_.name; }

  double eval(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) const override {
    return metric_eval(t_, sigma, x, y);
  }

  double coeval(const SpdMatrix& sigma, const SymMatrix& w, const SymMatrix& w2) const override {
    return cometric_eval(t_, sigma, w, w2);
  }

  Matrix metric_gram(const SpdMatrix& sigma) const override {
    const Index n = sigma.dim();
    const Vector& d = sigma.eig().d;
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i != j) w(i, j) = triple_alpha_at(t_, d, i, j);
      }
    return gram_from_weights(primed_basis(sigma), w, s_matrix(t_, d).S);
  }

  Matrix cometric_gram(const SpdMatrix& sigma) const override {
    const Index n = sigma.dim();
    const Vector& d = sigma.eig().d;
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i != j) w(i, j) = 1.0 / triple_alpha_at(t_, d, i, j);
      }
    const Matrix s = s_matrix(t_, d).S;
    Eigen::LDLT<Matrix> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw std::domain_error("cometric: diagonal block S(d) is numerically singular");
    }
    return gram_from_weights(primed_basis(sigma), w, ldlt.solve(Matrix::Identity(n, n)));
  }

 private:
  MetricTriple t_;
};

class SeparableModel : public MetricModel {
 public:
  SeparableModel(SeparableSpec s, Index n) : s_(std::move(s)), n_(n) {}

  Index dim() const override { return n_; }
  std::string name() const override { return s_.name; }

  double eval(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) const override {
    return separable_eval(s_, sigma, x, y);
  }

  double coeval(const SpdMatrix& sigma, const SymMatrix& w, const SymMatrix& w2) const override {
    const EigenDecomp& e = sigma.eig();
    const Matrix sinv = separable_cometric(s_, e.d).s_inverse;
    const Matrix wp = e.P.transpose() * w.m() * e.P;
    const Matrix wp2 = e.P.transpose() * w2.m() * e.P;
    double acc = 0.0;
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < n_; ++j) {
        if (i != j) {
          const double ps = s_.psi(e.d(i), e.d(j));
          acc += wp(i, j) * wp2(i, j) / (ps * ps);
        }
        acc += sinv(i, j) * wp(i, i) * wp2(j, j);
      }
    return acc;
  }

  Matrix metric_gram(const SpdMatrix& sigma) const override {
    const Vector& d = sigma.eig().d;
    Matrix w(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < n_; ++j) {
        const double ps = s_.psi(d(i), d(j));
        w(i, j) = ps * ps;
      }
    return gram_from_weights(primed_basis(sigma), w, separable_s_matrix(s_, d));
  }

  Matrix cometric_gram(const SpdMatrix& sigma) const override {
    const Vector& d = sigma.eig().d;
    Matrix w(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < n_; ++j) {
        const double ps = s_.psi(d(i), d(j));
        w(i, j) = 1.0 / (ps * ps);
      }
    return gram_from_weights(primed_basis(sigma), w, separable_cometric(s_, d).s_inverse);
  }

 private:
  SeparableSpec s_;
  Index n_;
};

}  // namespace

Matrix MetricModel::metric_gram(const SpdMatrix& sigma) const {
  const Index nb = sym_dim(sigma.dim());
  Matrix g(nb, nb);
  for (Index a = 0; a < nb; ++a) {
    const SymMatrix ea(sym_basis_matrix(sigma.dim(), a));
    for (Index b = a; b < nb; ++b) {
      const SymMatrix eb(sym_basis_matrix(sigma.dim(), b));
      g(a, b) = g(b, a) = eval(sigma, ea, eb);
    }
  }
  return g;
}

Matrix MetricModel::cometric_gram(const SpdMatrix& sigma) const {
  const Index nb = sym_dim(sigma.dim());
  Matrix g(nb, nb);
  for (Index a = 0; a < nb; ++a) {
    const SymMatrix ea(sym_basis_matrix(sigma.dim(), a));
    for (Index b = a; b < nb; ++b) {
      const SymMatrix eb(sym_basis_matrix(sigma.dim(), b));
      g(a, b) = g(b, a) = coeval(sigma, ea, eb);
    }
  }
  return g;
}

SpdMatrix MetricModel::closed_exp(const SpdMatrix&, const SymMatrix&, double) const {
  throw unsupported_operation("metric '" + name() + "' has no closed-form geodesics");
}

Matrix MetricModel::cometric_gram_derivative(const SpdMatrix& sigma, Index l,
                                             double fd_step) const {
  const Index n = sigma.dim();
  Vector x = sym_to_coords(sigma.m());
  const double h = fd_step * std::max(1.0, x.cwiseAbs().maxCoeff());
  Vector xp = x;
  xp(l) = x(l) + h;
  const Matrix gp = cometric_gram(SpdMatrix(coords_to_sym(xp, n)));
  xp(l) = x(l) - h;
  const Matrix gm = cometric_gram(SpdMatrix(coords_to_sym(xp, n)));
  return (gp - gm) / (2.0 * h);
}

MetricModelPtr make_model(const BostSpec& b) {
  return std::make_shared<BostModel>(b, "bost(" + b.phi.name + ")");
}

MetricModelPtr make_model(const KernelSpec& k, Index n) {
  return std::make_shared<BostModel>(BostSpec(k, 1.0, 0.0, n), k.name);
}

MetricModelPtr make_model(const MetricTriple& t) { return std::make_shared<TripleModel>(t); }

MetricModelPtr make_model(const SeparableSpec& s, Index n) {
  return std::make_shared<SeparableModel>(s, n);
}

MetricModelPtr make_model(const MetricId& id, Index n) {
  switch (id.kind) {
    case MetricKind::Euclidean: {
      const STParams p = id.st(n);
      return std::make_shared<BostModel>(
          BostSpec(builtin_kernel("euclidean"), p.alpha, p.beta, n), id.name(), id);
    }
    case MetricKind::LogEuclidean: {
      const STParams p = id.st(n);
      return std::make_shared<BostModel>(
          BostSpec(builtin_kernel("log_euclidean"), p.alpha, p.beta, n), id.name(), id);
    }
    case MetricKind::AffineInvariant: {
      const STParams p = id.st(n);
      return std::make_shared<BostModel>(
          BostSpec(builtin_kernel("affine_invariant"), p.alpha, p.beta, n), id.name(), id);
    }
    case MetricKind::BuresWasserstein:
      return std::make_shared<BostModel>(
          BostSpec(builtin_kernel("bures_wasserstein"), 1.0, 0.0, n), id.name(), id);
    case MetricKind::Bkm:
      return std::make_shared<BostModel>(BostSpec(builtin_kernel("bkm"), 1.0, 0.0, n),
                                         id.name());
    case MetricKind::PolarAffine: {
      const STParams p = id.st(n);
      // square-map pullback of the affine-invariant weight
      const KernelSpec pa = pullback_kernel(builtin_kernel("affine_invariant"), fn_pow(2.0));
      return std::make_shared<BostModel>(BostSpec(pa, p.alpha, p.beta, n), id.name(), id);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace spdgeo
