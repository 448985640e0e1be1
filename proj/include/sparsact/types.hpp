#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace sparsact {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// The Lyapunov operator A1 is not invertible: A has eigenvalues
/// lambda, mu with lambda + conj(mu) = 0, so X cannot be expressed
/// as a function of Y.
class SingularOperatorError : public std::runtime_error {
 public:
  explicit SingularOperatorError(const std::string& what)
      : std::runtime_error(what) {}
};

/// X(Y) is not positive definite; Y lies outside the stabilizing set.
class InfeasibleYError : public std::runtime_error {
 public:
  explicit InfeasibleYError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Sublevel-set constants require Q > 0; the formulas divide by
/// lambda_min(Q).
class BoundUnavailableError : public std::runtime_error {
 public:
  explicit BoundUnavailableError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A reduced actuator set leaves (A, B_sp) non-stabilizable.
class PolishInfeasibleError : public std::runtime_error {
 public:
  explicit PolishInfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A Hermitian form produced a scalar with a non-negligible imaginary
/// part; indicates a symmetry bug upstream.
class InternalConsistencyError : public std::logic_error {
 public:
  explicit InternalConsistencyError(const std::string& what)
      : std::logic_error(what) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// System matrices defining one actuator-selection or completion
/// instance: dx = A x + B u + d, y = C x, noise covariance V,
/// cost weights Q (state) and R (input).
struct PlantModel {
  CMatrix A;  // n x n
  CMatrix B;  // n x m
  CMatrix C;  // p x n
  CMatrix V;  // n x n, Hermitian, V > 0
  CMatrix Q;  // n x n, Hermitian, Q >= 0
  CMatrix R;  // m x m, Hermitian, R > 0

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }

  /// Checks dimensions, Hermitian tags, and definiteness. When
  /// `require_v_pd` is false, V is only required to be positive
  /// semidefinite (the sensor dual produces V = C*C which is singular
  /// whenever p < n).
  void validate(bool require_v_pd = true) const;
};

/// Output-covariance constraint data: structural 0/1 mask E and known
/// entries G with G = 0 wherever E = 0.
struct CompletionData {
  RMatrix E;  // p x p, entries in {0, 1}, symmetric
  CMatrix G;  // p x p

  void validate(Eigen::Index p) const;
};

/// Symmetrizes a computed Hermitian matrix to suppress roundoff drift.
inline CMatrix hermitianize(const CMatrix& M) {
  return 0.5 * (M + M.adjoint());
}

/// Real part of a scalar that must be real up to roundoff. Throws
/// InternalConsistencyError when the imaginary residue exceeds 1e-8
/// relative to `scale`.
double real_part_checked(Complex z, double scale);

/// Re<M1, M2> with <M1, M2> = trace(M1^* M2).
inline double real_inner(const CMatrix& M1, const CMatrix& M2) {
  return (M1.conjugate().cwiseProduct(M2)).sum().real();
}

}  // namespace sparsact
