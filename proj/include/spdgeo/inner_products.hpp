// Rotation-invariant inner products on symmetric matrices: the two-parameter
// scaling/trace family, the linear map pulling it back to Frobenius, and the
// sign- and signed-permutation-invariant generalizations used as test oracles.
#pragma once

#include "spdgeo/types.hpp"

namespace spdgeo {

// Parameters (alpha, beta) with min(alpha, alpha + n*beta) > 0.
struct STParams {
  double alpha;
  double beta;
  Index n;

  STParams(double a, double b, Index dim);
};

// alpha * tr(XY) + beta * tr(X) * tr(Y).
double onp_inner(const STParams& p, const SymMatrix& x, const SymMatrix& y);

// F(X) = q X + ((p - q)/n) tr(X) I with p = sqrt(alpha + n beta), q = sqrt(alpha).
// Frobenius norm of the image equals the onp_inner norm of the argument.
SymMatrix fpq_map(const STParams& p, const SymMatrix& x);

// Inner product invariant under conjugation by diagonal sign matrices:
// sum_{i != j} alpha_ij X_ij Y_ij + sum_{i,j} S_ij X_ii Y_jj.
struct DpmInnerSpec {
  Matrix alpha_ij;  // symmetric, positive off the diagonal; diagonal unused
  SpdMatrix S;

  DpmInnerSpec(const Matrix& a, const SpdMatrix& s);
};

double dpm_inner(const DpmInnerSpec& spec, const SymMatrix& x, const SymMatrix& y);

// Inner product invariant under signed permutations:
// gamma sum_i X_ii Y_ii + alpha sum_{i != j} X_ij Y_ij + beta sum_{i != j} X_ii Y_jj,
// with alpha > 0, gamma > beta, gamma + (n-1) beta > 0.
struct SpmInnerSpec {
  double alpha;
  double beta;
  double gamma;
  Index n;

  SpmInnerSpec(double a, double b, double g, Index dim);
};

double spm_inner(const SpmInnerSpec& spec, const SymMatrix& x, const SymMatrix& y);

}  // namespace spdgeo
