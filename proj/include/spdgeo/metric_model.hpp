// Uniform view of a metric and its dual as Gram matrices in the orthonormal
// coordinate basis of Sym(n); backs the Hamiltonian integrator, the
// musical isomorphisms and the duality checks.
#pragma once

#include <memory>
#include <string>

#include "spdgeo/classical.hpp"
#include "spdgeo/invariant_metrics.hpp"
#include "spdgeo/kernels.hpp"

namespace spdgeo {

class MetricModel {
 public:
  virtual ~MetricModel() = default;

  virtual Index dim() const = 0;
  virtual std::string name() const = 0;

  virtual double eval(const SpdMatrix& sigma, const SymMatrix& x, const SymMatrix& y) const = 0;
  virtual double coeval(const SpdMatrix& sigma, const SymMatrix& w,
                        const SymMatrix& w2) const = 0;

  // Gram matrices of the metric and its dual in the sym coordinate basis.
  virtual Matrix metric_gram(const SpdMatrix& sigma) const;
  virtual Matrix cometric_gram(const SpdMatrix& sigma) const;

  // Derivative of the dual Gram along coordinate direction l. The base
  // implementation central-differences cometric_gram with the given relative
  // step; models with registered kernel derivatives override it exactly.
  virtual Matrix cometric_gram_derivative(const SpdMatrix& sigma, Index l, double fd_step) const;

  // Closed-form geodesic endpoint when available (classical families).
  virtual bool has_closed_exp() const { return false; }
  virtual SpdMatrix closed_exp(const SpdMatrix& sigma, const SymMatrix& x, double t) const;
};

using MetricModelPtr = std::shared_ptr<const MetricModel>;

MetricModelPtr make_model(const BostSpec& b);
MetricModelPtr make_model(const KernelSpec& k, Index n);
MetricModelPtr make_model(const MetricTriple& t);
MetricModelPtr make_model(const SeparableSpec& s, Index n);
// Classical selectors map onto the trace-extended kernel family; BKM has no
// closed-form geodesics and integrates like any other kernel metric.
MetricModelPtr make_model(const MetricId& id, Index n);

}  // namespace spdgeo
