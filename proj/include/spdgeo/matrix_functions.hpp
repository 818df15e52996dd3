// Scalar functions lifted to symmetric matrices through the spectral
// decomposition, their first and second differentials via divided
// differences, Sylvester solves and square roots of SPD products.
#pragma once

#include <functional>
#include <string>

#include "spdgeo/types.hpp"

namespace spdgeo {

// A scalar map together with its derivatives, extended to matrices by
// acting on eigenvalues. domain_lo is an open lower bound on admissible
// eigenvalues (0 for log and powers, -inf for exp).
struct UnivariateFn {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;  // may be empty; required by second differentials
  double domain_lo = 0.0;
  std::string name;
};

UnivariateFn fn_identity();
UnivariateFn fn_log();
UnivariateFn fn_exp();     // domain all reals
UnivariateFn fn_pow(double p);
UnivariateFn fn_sqrt();
UnivariateFn fn_exp_shifted();  // x -> exp(x) - 1 + x, a diffeomorphism of (0, inf)

// Spectral decomposition with ascending eigenvalues and a deterministic
// eigenvector sign convention.
EigenDecomp eigh(const SymMatrix& sigma);

// (f(x) - f(y)) / (x - y), switching to df at the midpoint once the relative
// spacing drops below kDividedDiffSwitch. Exactly symmetric in (x, y).
double divided_difference(const UnivariateFn& f, double x, double y);

// Second-order divided difference, symmetric in all three arguments, with
// cancellation-safe limit branches below kSecondDiffSwitch relative spacing.
double divided_difference2(const UnivariateFn& f, double x, double y, double z);

// f(P D P^T) = P f(D) P^T. Throws std::domain_error if an eigenvalue is
// outside the domain of f.
SymMatrix univariate_apply(const UnivariateFn& f, const SpdMatrix& sigma);
SymMatrix univariate_apply_sym(const UnivariateFn& f, const SymMatrix& s);

// Differential of the lifted map: entrywise divided-difference weights in the
// eigenbasis. Linear in x.
SymMatrix univariate_diff(const UnivariateFn& f, const SpdMatrix& sigma, const SymMatrix& x);
SymMatrix univariate_diff_sym(const UnivariateFn& f, const SymMatrix& s, const SymMatrix& x);

// Second differential d^2 f(x, y), symmetric bilinear.
SymMatrix univariate_diff2(const UnivariateFn& f, const SpdMatrix& sigma, const SymMatrix& x,
                           const SymMatrix& y);

// Inverse of the differential of log at sigma: divide by log-divided-differences
// in the eigenbasis.
SymMatrix dlog_inverse(const SpdMatrix& sigma, const SymMatrix& w);

// Unique symmetric solution of sigma X0 + X0 sigma = x.
SymMatrix sylvester_lift(const SpdMatrix& sigma, const SymMatrix& x);

// (sigma lambda)^{1/2} = sigma^{1/2} (sigma^{1/2} lambda sigma^{1/2})^{1/2} sigma^{-1/2}.
// Generally non-symmetric; its square is sigma*lambda and its eigenvalues are positive.
Matrix sqrt_product(const SpdMatrix& sigma, const SpdMatrix& lambda);

SpdMatrix spd_sqrt(const SpdMatrix& sigma);
SpdMatrix spd_inverse(const SpdMatrix& sigma);
SpdMatrix spd_exp_sym(const SymMatrix& s);  // matrix exponential of a symmetric matrix
SymMatrix spd_log(const SpdMatrix& sigma);

}  // namespace spdgeo
