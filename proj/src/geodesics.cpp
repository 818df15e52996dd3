#include "spdgeo/geodesics.hpp"

#include <cmath>

namespace spdgeo {

namespace {

bool is_spd_coords(const Vector& x, Index n) {
  const Matrix s = coords_to_sym(x, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) > 0.0;
}

SpdMatrix spd_from_coords(const Vector& x, Index n) { return SpdMatrix(coords_to_sym(x, n)); }

struct HamiltonianFlow {
  const MetricModel& metric;
  Index n;
  double fd_step;

  Matrix cogram(const Vector& x) const { return metric.cometric_gram(spd_from_coords(x, n)); }

  Vector xdot(const Vector& x, const Vector& p) const { return cogram(x) * p; }

  Vector pdot(const Vector& x, const Vector& p) const {
    const Index nb = x.size();
    Vector out(nb);
    const SpdMatrix sigma = spd_from_coords(x, n);
    for (Index l = 0; l < nb; ++l) {
      out(l) = -0.5 * p.dot(metric.cometric_gram_derivative(sigma, l, fd_step) * p);
    }
    return out;
  }
};

}  // namespace

SymMatrix momentum_from_velocity(const MetricModel& metric, const SpdMatrix& sigma,
                                 const SymMatrix& x) {
  const Vector p = metric.metric_gram(sigma) * sym_to_coords(x.m());
  return SymMatrix(coords_to_sym(p, sigma.dim()));
}

SymMatrix velocity_from_momentum(const MetricModel& metric, const SpdMatrix& sigma,
                                 const SymMatrix& w) {
  const Vector v = metric.cometric_gram(sigma) * sym_to_coords(w.m());
  return SymMatrix(coords_to_sym(v, sigma.dim()));
}

double hamiltonian_energy(const MetricModel& metric, const HamiltonianState& s, Index n) {
  const Matrix g = metric.cometric_gram(spd_from_coords(s.x, n));
  return 0.5 * s.p.dot(g * s.p);
}

double HamiltonianResult::energy_drift() const {
  double drift = 0.0;
  for (double h : energies) drift = std::max(drift, std::abs(h - energies.front()));
  return drift;
}

HamiltonianResult hamiltonian_geodesic(const MetricModel& metric, const SpdMatrix& sigma,
                                       const SymMatrix& x, double t_final,
                                       const IntegratorConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("hamiltonian_geodesic: steps must be >= 1");
  const Index n = sigma.dim();
  const HamiltonianFlow flow{metric, n, cfg.fd_step};

  HamiltonianState s{sym_to_coords(sigma.m()), sym_to_coords(momentum_from_velocity(metric, sigma, x).m())};
  const double h = t_final / cfg.steps;

  HamiltonianResult res;
  res.trajectory.reserve(cfg.steps + 1);
  res.trajectory.emplace_back(0.0, sigma);
  res.energies.reserve(cfg.steps + 1);
  res.energies.push_back(hamiltonian_energy(metric, s, n));

  for (int k = 0; k < cfg.steps; ++k) {
    HamiltonianState next = s;
    try {
      if (cfg.scheme == Scheme::rk4) {
        const Vector kx1 = flow.xdot(s.x, s.p), kp1 = flow.pdot(s.x, s.p);
        const Vector kx2 = flow.xdot(s.x + 0.5 * h * kx1, s.p + 0.5 * h * kp1);
        const Vector kp2 = flow.pdot(s.x + 0.5 * h * kx1, s.p + 0.5 * h * kp1);
        const Vector kx3 = flow.xdot(s.x + 0.5 * h * kx2, s.p + 0.5 * h * kp2);
        const Vector kp3 = flow.pdot(s.x + 0.5 * h * kx2, s.p + 0.5 * h * kp2);
        const Vector kx4 = flow.xdot(s.x + h * kx3, s.p + h * kp3);
        const Vector kp4 = flow.pdot(s.x + h * kx3, s.p + h * kp3);
        next.x = s.x + h / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        next.p = s.p + h / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
      } else {
        const Vector kx1 = flow.xdot(s.x, s.p), kp1 = flow.pdot(s.x, s.p);
        const Vector xm = s.x + 0.5 * h * kx1, pm = s.p + 0.5 * h * kp1;
        next.x = s.x + h * flow.xdot(xm, pm);
        next.p = s.p + h * flow.pdot(xm, pm);
      }
    } catch (const std::domain_error&) {
      // a stage evaluation fell outside the cone
      throw std::domain_error("hamiltonian_geodesic: left the SPD cone after t=" +
                              std::to_string(k * h));
    }
    if (!is_spd_coords(next.x, n)) {
      throw std::domain_error("hamiltonian_geodesic: left the SPD cone after t=" +
                              std::to_string(k * h));
    }
    s = next;
    res.trajectory.emplace_back((k + 1) * h, spd_from_coords(s.x, n));
    res.energies.push_back(hamiltonian_energy(metric, s, n));
  }
  res.final_state = s;
  return res;
}

namespace {

// Geodesic curve and derivative in closed form per metric.
struct ClosedGeodesic {
  MetricId id;
  SpdMatrix sigma;
  SymMatrix v;  // initial velocity (log of the target)

  SpdMatrix point(double t) const { return exp_map(id, sigma, v, t); }

  SymMatrix velocity(double t) const {
    switch (id.kind) {
      case MetricKind::Euclidean:
        return v;
      case MetricKind::LogEuclidean: {
        const SymMatrix w = univariate_diff(fn_log(), sigma, v);
        const SymMatrix at(spd_log(sigma).m() + t * w.m());
        return univariate_diff_sym(fn_exp(), at, w);
      }
      case MetricKind::AffineInvariant: {
        const SpdMatrix rt = spd_sqrt(sigma);
        const Matrix irt =
            rt.eig().P * rt.eig().d.cwiseInverse().asDiagonal() * rt.eig().P.transpose();
        const Matrix m = irt * v.m() * irt;
        const SpdMatrix e = spd_exp_sym(SymMatrix(t * m));
        return SymMatrix(rt.m() * (0.5 * (m * e.m() + e.m() * m)) * rt.m());
      }
      case MetricKind::BuresWasserstein: {
        const SymMatrix v0 = sylvester_lift(sigma, v);
        return SymMatrix(v.m() + 2.0 * t * (v0.m() * sigma.m() * v0.m()));
      }
      case MetricKind::PolarAffine: {
        const ClosedGeodesic inner{MetricId{MetricKind::AffineInvariant, id.ab},
                                   SpdMatrix(sigma.m() * sigma.m()),
                                   SymMatrix(sigma.m() * v.m() + v.m() * sigma.m())};
        return sylvester_lift(point(t), inner.velocity(t));
      }
      case MetricKind::Bkm:
        throw unsupported_operation("bkm: geodesics are not available in closed form");
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace

SymMatrix connection_transport(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda,
                               const SymMatrix& x, const IntegratorConfig& cfg) {
  if (id.kind == MetricKind::Bkm) {
    throw unsupported_operation("bkm: transport requires a geodesic, none is known");
  }
  if (cfg.steps < 1) throw std::invalid_argument("connection_transport: steps must be >= 1");
  const ClosedGeodesic geo{id, sigma, log_map(id, sigma, lambda)};
  const double h = 1.0 / cfg.steps;
  // X' = -Gamma(gamma(t); gamma'(t), X)
  auto rhs = [&](double t, const Matrix& xm) {
    const SpdMatrix g = geo.point(t);
    const SymMatrix gdot = geo.velocity(t);
    return (-connection_correction(id, g, gdot, SymMatrix(xm)).m()).eval();
  };
  Matrix xc = x.m();
  for (int k = 0; k < cfg.steps; ++k) {
    const double t = k * h;
    const Matrix k1 = rhs(t, xc);
    const Matrix k2 = rhs(t + 0.5 * h, xc + 0.5 * h * k1);
    const Matrix k3 = rhs(t + 0.5 * h, xc + 0.5 * h * k2);
    const Matrix k4 = rhs(t + h, xc + h * k3);
    xc += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return SymMatrix(xc);
}

SymMatrix bw_transport_ode(const SpdMatrix& sigma, const SpdMatrix& lambda, const SymMatrix& x,
                           const IntegratorConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("bw_transport_ode: steps must be >= 1");
  const SpdMatrix rt = spd_sqrt(sigma);
  const Matrix irt = rt.eig().P * rt.eig().d.cwiseInverse().asDiagonal() * rt.eig().P.transpose();
  const Matrix middle = spd_sqrt(SpdMatrix(rt.m() * lambda.m() * rt.m())).m();
  const Matrix gh1 = irt * middle;          // horizontal lift endpoint
  const Matrix ghdot = gh1 - rt.m();        // constant lift velocity

  auto gh = [&](double t) { return ((1.0 - t) * rt.m() + t * gh1).eval(); };
  auto gamma = [&](double t) {
    const Matrix g = gh(t);
    return SpdMatrix(g * g.transpose());
  };

  auto rhs = [&](double t, const Matrix& x0) {
    const SpdMatrix g = gamma(t);
    const Matrix ght = gh(t);
    const Matrix forcing = ght * ghdot.transpose() * x0 + x0 * ghdot * ght.transpose();
    return sylvester_lift(g, SymMatrix(-forcing)).m().eval();
  };

  Matrix x0 = sylvester_lift(sigma, x).m();
  const double h = 1.0 / cfg.steps;
  for (int k = 0; k < cfg.steps; ++k) {
    const double t = k * h;
    const Matrix k1 = rhs(t, x0);
    const Matrix k2 = rhs(t + 0.5 * h, x0 + 0.5 * h * k1);
    const Matrix k3 = rhs(t + 0.5 * h, x0 + 0.5 * h * k2);
    const Matrix k4 = rhs(t + h, x0 + h * k3);
    x0 += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Matrix end = lambda.m();
  return SymMatrix(end * x0 + x0 * end);
}

}  // namespace spdgeo
