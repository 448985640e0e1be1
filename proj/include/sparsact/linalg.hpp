#pragma once

#include <Eigen/Dense>

#include "sparsact/types.hpp"

namespace sparsact {

/// Lyapunov back-substitution engine. Computes the complex Schur form
/// of A once and reuses it for every solve with A or A^*; a full solve
/// is then O(n^3) with a small constant.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const CMatrix& A);

  /// Solves A X + X A^* + W = 0. Result is Hermitianized when W is.
  CMatrix solve(const CMatrix& W) const;

  /// Solves A^* W + W A + M = 0 (the adjoint direction, reusing the
  /// same Schur factorization).
  CMatrix solve_adjoint(const CMatrix& M) const;

  const Eigen::VectorXcd& eigenvalues() const { return eigs_; }

 private:
  Eigen::Index n_;
  CMatrix U_;  // unitary Schur factor, A = U T U^*
  CMatrix T_;  // upper triangular
  Eigen::VectorXcd eigs_;
};

/// Solves A X + X A^* + W = 0 via Schur back-substitution.
/// Throws SingularOperatorError when some eigenvalues lambda, mu of A
/// satisfy lambda + conj(mu) = 0.
CMatrix solve_lyapunov(const CMatrix& A, const CMatrix& W);

/// Independent test oracle: solves the vectorized n^2 x n^2 linear
/// system directly. Intended for n <= 32.
CMatrix lyapunov_kronecker_oracle(const CMatrix& A, const CMatrix& W);

/// A1(X) = A X + X A^*
CMatrix apply_A1(const CMatrix& A, const CMatrix& X);

/// B(Y) = B Y + Y^* B^*
CMatrix apply_B(const CMatrix& B, const CMatrix& Y);

/// A2(X) = (C X C^*) o E
CMatrix apply_A2(const CMatrix& C, const RMatrix& E, const CMatrix& X);

/// A2^dagger(Lambda) = C^* (E o Lambda) C
CMatrix apply_A2_adjoint(const CMatrix& C, const RMatrix& E,
                         const CMatrix& Lambda);

/// X(Y) = A1^{-1}(B(Y) - V), the unique covariance consistent with Y.
CMatrix x_of_y(const PlantModel& model, const CMatrix& Y);
CMatrix x_of_y(const PlantModel& model, const LyapunovSolver& lyap,
               const CMatrix& Y);

/// True iff the Hermitianized X admits a Cholesky factorization.
bool is_positive_definite(const CMatrix& X);

/// Maximum real part of the eigenvalues of A.
double spectral_abscissa(const CMatrix& A);

struct AreSolution {
  CMatrix P;   // stabilizing Riccati solution
  CMatrix Kc;  // R^{-1} B^* P
  CMatrix Xc;  // closed-loop covariance, solves (A - B Kc) X + X (.)^* + V = 0
};

/// Stabilizing solution of A^* P + P A - P B R^{-1} B^* P + Q = 0 by
/// Newton-Kleinman iteration (one Lyapunov solve per step). Requires
/// (A, B) stabilizable and R > 0.
AreSolution solve_are(const PlantModel& model);

/// A stabilizing feedback gain for (A, B). Returns zero when A is
/// already Hurwitz; otherwise uses the shifted-Lyapunov (Bass) method.
CMatrix stabilizing_gain(const CMatrix& A, const CMatrix& B);

}  // namespace sparsact
