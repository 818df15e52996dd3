// Numerical geodesics without Christoffel symbols: first-order Hamiltonian
// integration driven by the dual metric, parallel transport along closed-form
// geodesics, and the Bures-Wasserstein transport ODE.
#pragma once

#include <utility>
#include <vector>

#include "spdgeo/classical.hpp"
#include "spdgeo/metric_model.hpp"

namespace spdgeo {

// Position and momentum coordinates in the orthonormal basis of Sym(n).
struct HamiltonianState {
  Vector x;
  Vector p;
};

enum class Scheme { rk4, midpoint };

struct IntegratorConfig {
  int steps = 100;
  Scheme scheme = Scheme::rk4;
  double fd_step = 1e-6;  // relative step for the central differences of the dual Gram
};

// Covector representative of the metric dual of x (Frobenius pairing).
SymMatrix momentum_from_velocity(const MetricModel& metric, const SpdMatrix& sigma,
                                 const SymMatrix& x);
// Inverse map through the dual metric.
SymMatrix velocity_from_momentum(const MetricModel& metric, const SpdMatrix& sigma,
                                 const SymMatrix& w);

struct HamiltonianResult {
  std::vector<std::pair<double, SpdMatrix>> trajectory;  // (t_k, Sigma(t_k)), steps + 1 entries
  std::vector<double> energies;                          // 1/2 g*(p, p) at each step
  HamiltonianState final_state;

  const SpdMatrix& endpoint() const { return trajectory.back().second; }
  double energy_drift() const;  // max |H_k - H_0|
};

// Integrates x' = G*(x) p, p' = -1/2 p^T dG*/dx p from (sigma, x) to t_final.
// Every accepted step is checked to stay inside the cone; leaving it raises a
// std::domain_error carrying the last valid time.
HamiltonianResult hamiltonian_geodesic(const MetricModel& metric, const SpdMatrix& sigma,
                                       const SymMatrix& x, double t_final,
                                       const IntegratorConfig& cfg = {});

// Hamiltonian value 1/2 g*(p, p) at a state.
double hamiltonian_energy(const MetricModel& metric, const HamiltonianState& s, Index n);

// Parallel transport of x from sigma to lambda by integrating the connection
// equation along the metric's closed-form geodesic.
SymMatrix connection_transport(const MetricId& id, const SpdMatrix& sigma, const SpdMatrix& lambda,
                               const SymMatrix& x, const IntegratorConfig& cfg = {});

// Bures-Wasserstein transport between arbitrary endpoints: integrates the
// lifted field X0(t) with a Sylvester solve per stage.
SymMatrix bw_transport_ode(const SpdMatrix& sigma, const SpdMatrix& lambda, const SymMatrix& x,
                           const IntegratorConfig& cfg = {});

}  // namespace spdgeo
