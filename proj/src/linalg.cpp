#include "sparsact/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace sparsact {

namespace {

void require_square(const CMatrix& M, const char* name) {
  if (M.rows() != M.cols()) {
    std::ostringstream os;
    os << name << " must be square, got " << M.rows() << "x" << M.cols();
    throw DimensionError(os.str());
  }
}

void require_same_shape(const CMatrix& M, Eigen::Index rows, Eigen::Index cols,
                        const char* name) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << name << " must be " << rows << "x" << cols << ", got " << M.rows()
       << "x" << M.cols();
    throw DimensionError(os.str());
  }
}

// Smallest |lambda_i + conj(lambda_j)| over all eigenvalue pairs; zero
// means A1 is singular.
void check_invertible(const Eigen::VectorXcd& eigs, double scale) {
  const double tol = 1e-10 * (1.0 + scale);
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    for (Eigen::Index j = 0; j < eigs.size(); ++j) {
      if (std::abs(eigs(i) + std::conj(eigs(j))) <= tol) {
        std::ostringstream os;
        os << "Lyapunov operator A1 is singular: eigenvalues " << eigs(i)
           << " and " << eigs(j) << " of A satisfy lambda + conj(mu) = 0. "
           << "X cannot be expressed as a function of Y for this A; "
           << "re-center the design variable around a stabilizing gain.";
        throw SingularOperatorError(os.str());
      }
    }
  }
}

}  // namespace

LyapunovSolver::LyapunovSolver(const CMatrix& A) : n_(A.rows()) {
  require_square(A, "A");
  Eigen::ComplexSchur<CMatrix> schur(A);
  if (schur.info() != Eigen::Success) {
    throw SolverError("complex Schur decomposition did not converge");
  }
  U_ = schur.matrixU();
  T_ = schur.matrixT();
  eigs_ = T_.diagonal();
  check_invertible(eigs_, eigs_.cwiseAbs().maxCoeff());
}

CMatrix LyapunovSolver::solve(const CMatrix& W) const {
  require_same_shape(W, n_, n_, "W");
  const CMatrix Wt = U_.adjoint() * W * U_;
  CMatrix Z = CMatrix::Zero(n_, n_);
  // T Z + Z T^* = -Wt, columns back to front: the j-th column couples
  // only to columns > j through the strictly upper part of T.
  for (Eigen::Index j = n_ - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = -Wt.col(j);
    const Eigen::Index tail = n_ - 1 - j;
    if (tail > 0) {
      rhs.noalias() -= Z.rightCols(tail) * T_.row(j).tail(tail).adjoint();
    }
    CMatrix shifted = T_;
    shifted.diagonal().array() += std::conj(T_(j, j));
    Z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  CMatrix X = U_ * Z * U_.adjoint();
  if ((W - W.adjoint()).norm() <= 1e-10 * (1.0 + W.norm())) {
    X = hermitianize(X);
  }
  return X;
}

CMatrix LyapunovSolver::solve_adjoint(const CMatrix& M) const {
  require_same_shape(M, n_, n_, "M");
  const CMatrix Mt = U_.adjoint() * M * U_;
  CMatrix Z = CMatrix::Zero(n_, n_);
  // T^* Z + Z T = -Mt, columns front to back; T^* is lower triangular.
  for (Eigen::Index j = 0; j < n_; ++j) {
    Eigen::VectorXcd rhs = -Mt.col(j);
    if (j > 0) {
      rhs.noalias() -= Z.leftCols(j) * T_.col(j).head(j);
    }
    CMatrix shifted = T_.adjoint();
    shifted.diagonal().array() += T_(j, j);
    Z.col(j) = shifted.triangularView<Eigen::Lower>().solve(rhs);
  }
  CMatrix Wout = U_ * Z * U_.adjoint();
  if ((M - M.adjoint()).norm() <= 1e-10 * (1.0 + M.norm())) {
    Wout = hermitianize(Wout);
  }
  return Wout;
}

CMatrix solve_lyapunov(const CMatrix& A, const CMatrix& W) {
  return LyapunovSolver(A).solve(W);
}

CMatrix lyapunov_kronecker_oracle(const CMatrix& A, const CMatrix& W) {
  require_square(A, "A");
  const Eigen::Index n = A.rows();
  require_same_shape(W, n, n, "W");
  // vec(A X + X A^*) = (I kron A + conj(A) kron I) vec(X)
  CMatrix op = CMatrix::Zero(n * n, n * n);
  const CMatrix I = CMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) = I(i, j) * A + std::conj(A(j, i)) * I;
    }
  }
  Eigen::FullPivLU<CMatrix> lu(op);
  if (!lu.isInvertible()) {
    throw SingularOperatorError("vectorized Lyapunov system is singular");
  }
  Eigen::VectorXcd w = Eigen::Map<const Eigen::VectorXcd>(W.data(), n * n);
  Eigen::VectorXcd x = lu.solve(-w);
  CMatrix X = Eigen::Map<const CMatrix>(x.data(), n, n);
  return hermitianize(X);
}

CMatrix apply_A1(const CMatrix& A, const CMatrix& X) {
  require_square(A, "A");
  require_same_shape(X, A.rows(), A.rows(), "X");
  return A * X + X * A.adjoint();
}

CMatrix apply_B(const CMatrix& B, const CMatrix& Y) {
  if (B.cols() != Y.rows() || Y.cols() != B.rows()) {
    throw DimensionError("apply_B: B is n x m, Y must be m x n");
  }
  const CMatrix BY = B * Y;
  return BY + BY.adjoint();
}

CMatrix apply_A2(const CMatrix& C, const RMatrix& E, const CMatrix& X) {
  if (C.cols() != X.rows() || X.rows() != X.cols()) {
    throw DimensionError("apply_A2: X must be n x n with n = cols(C)");
  }
  if (E.rows() != C.rows() || E.cols() != C.rows()) {
    throw DimensionError("apply_A2: E must be p x p with p = rows(C)");
  }
  return (C * X * C.adjoint()).cwiseProduct(E.cast<Complex>());
}

CMatrix apply_A2_adjoint(const CMatrix& C, const RMatrix& E,
                         const CMatrix& Lambda) {
  if (Lambda.rows() != C.rows() || Lambda.cols() != C.rows()) {
    throw DimensionError("apply_A2_adjoint: Lambda must be p x p");
  }
  if (E.rows() != C.rows() || E.cols() != C.rows()) {
    throw DimensionError("apply_A2_adjoint: E must be p x p");
  }
  return C.adjoint() * E.cast<Complex>().cwiseProduct(Lambda) * C;
}

CMatrix x_of_y(const PlantModel& model, const LyapunovSolver& lyap,
               const CMatrix& Y) {
  require_same_shape(Y, model.m(), model.n(), "Y");
  // A X + X A^* = B Y + Y^* B^* - V
  return lyap.solve(model.V - apply_B(model.B, Y));
}

CMatrix x_of_y(const PlantModel& model, const CMatrix& Y) {
  return x_of_y(model, LyapunovSolver(model.A), Y);
}

bool is_positive_definite(const CMatrix& X) {
  if (!X.allFinite()) return false;
  Eigen::LLT<CMatrix> llt(hermitianize(X));
  return llt.info() == Eigen::Success;
}

double spectral_abscissa(const CMatrix& A) {
  require_square(A, "A");
  Eigen::ComplexEigenSolver<CMatrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw SolverError("eigenvalue iteration did not converge");
  }
  return es.eigenvalues().real().maxCoeff();
}

CMatrix stabilizing_gain(const CMatrix& A, const CMatrix& B) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Eigen::ComplexEigenSolver<CMatrix> es(A, false);
  const double max_re = es.eigenvalues().real().maxCoeff();
  if (max_re < -1e-12) {
    return CMatrix::Zero(m, n);
  }
  // Bass shift: with beta exceeding every |Re lambda|, A + beta I is
  // anti-stable and W solving (A + beta I) W + W (A + beta I)^* = 2 B B^*
  // yields the stabilizing gain K0 = B^* W^{-1}.
  const double beta = es.eigenvalues().real().cwiseAbs().maxCoeff() + 1.0;
  const CMatrix A_shift = A + beta * CMatrix::Identity(n, n);
  const CMatrix W =
      hermitianize(solve_lyapunov(A_shift, -2.0 * B * B.adjoint()));
  // W is singular on the uncontrollable subspace; a pseudo-inverse keeps
  // those (necessarily stable) modes untouched.
  Eigen::SelfAdjointEigenSolver<CMatrix> wes(W);
  const double wmax = wes.eigenvalues().cwiseAbs().maxCoeff();
  const double cutoff = 1e-12 * (1.0 + wmax);
  CMatrix winv = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = wes.eigenvalues()(i);
    if (lam > cutoff) {
      winv += wes.eigenvectors().col(i) * wes.eigenvectors().col(i).adjoint() /
              lam;
    }
  }
  const CMatrix K0 = B.adjoint() * winv;
  if (spectral_abscissa(A - B * K0) >= 0.0) {
    throw SolverError(
        "stabilizing-gain bootstrap failed: (A, B) appears non-stabilizable");
  }
  return K0;
}

AreSolution solve_are(const PlantModel& model) {
  const Eigen::Index n = model.n();
  Eigen::LLT<CMatrix> r_llt(hermitianize(model.R));
  if (r_llt.info() != Eigen::Success) {
    throw SolverError("solve_are: R must be positive definite");
  }

  CMatrix K = stabilizing_gain(model.A, model.B);
  CMatrix P = CMatrix::Zero(n, n);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    const CMatrix Acl = model.A - model.B * K;
    LyapunovSolver lyap(Acl.adjoint());
    const CMatrix P_next =
        lyap.solve(hermitianize(model.Q + K.adjoint() * model.R * K));
    const double change = (P_next - P).norm();
    P = P_next;
    K = r_llt.solve(model.B.adjoint() * P);
    if (change <= 1e-13 * (1.0 + P.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SolverError("solve_are: Newton-Kleinman iteration did not converge");
  }

  const CMatrix residual = model.A.adjoint() * P + P * model.A -
                           P * model.B * r_llt.solve(model.B.adjoint() * P) +
                           model.Q;
  const double scale = P.norm() * model.A.norm() + model.Q.norm() + 1e-300;
  if (residual.norm() > 1e-8 * (1.0 + scale)) {
    throw SolverError("solve_are: Riccati residual too large");
  }

  AreSolution sol;
  sol.P = hermitianize(P);
  sol.Kc = K;
  const CMatrix Acl = model.A - model.B * sol.Kc;
  if (spectral_abscissa(Acl) >= 0.0) {
    throw SolverError("solve_are: closed loop is not Hurwitz");
  }
  sol.Xc = hermitianize(solve_lyapunov(Acl, model.V));
  return sol;
}

void PlantModel::validate(bool require_v_pd) const {
  if (A.rows() != A.cols()) throw DimensionError("A must be square");
  const Eigen::Index nn = A.rows();
  if (B.rows() != nn) throw DimensionError("B must have n rows");
  if (C.cols() != nn) throw DimensionError("C must have n columns");
  require_same_shape(V, nn, nn, "V");
  require_same_shape(Q, nn, nn, "Q");
  require_same_shape(R, B.cols(), B.cols(), "R");

  auto check_hermitian = [](const CMatrix& M, const char* name) {
    if ((M - M.adjoint()).norm() > 1e-10 * (1.0 + M.norm())) {
      throw std::invalid_argument(std::string(name) + " is not Hermitian");
    }
  };
  check_hermitian(V, "V");
  check_hermitian(Q, "Q");
  check_hermitian(R, "R");

  if (!is_positive_definite(R)) {
    throw std::invalid_argument("R must be positive definite");
  }
  auto min_eig = [](const CMatrix& M) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitianize(M));
    return es.eigenvalues().minCoeff();
  };
  const double q_scale =
      hermitianize(Q).cwiseAbs().maxCoeff() * static_cast<double>(nn);
  if (min_eig(Q) < -1e-10 * (1.0 + q_scale)) {
    throw std::invalid_argument("Q must be positive semidefinite");
  }
  if (require_v_pd) {
    if (!is_positive_definite(V)) {
      throw std::invalid_argument("V must be positive definite");
    }
  } else {
    const double v_scale =
        hermitianize(V).cwiseAbs().maxCoeff() * static_cast<double>(nn);
    if (min_eig(V) < -1e-10 * (1.0 + v_scale)) {
      throw std::invalid_argument("V must be positive semidefinite");
    }
  }
}

void CompletionData::validate(Eigen::Index p) const {
  if (E.rows() != p || E.cols() != p) throw DimensionError("E must be p x p");
  if (G.rows() != p || G.cols() != p) throw DimensionError("G must be p x p");
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (E(i, j) != 0.0 && E(i, j) != 1.0) {
        throw std::invalid_argument("E entries must be 0 or 1");
      }
    }
  }
  if (E != E.transpose()) {
    throw std::invalid_argument(
        "mask E must be symmetric so that A2 maps Hermitian to Hermitian");
  }
}

double real_part_checked(Complex z, double scale) {
  if (std::abs(z.imag()) > 1e-8 * (1.0 + std::max(std::abs(z.real()), scale))) {
    std::ostringstream os;
    os << "expected a real scalar, got imaginary residue " << z.imag()
       << " (value " << z.real() << ")";
    throw InternalConsistencyError(os.str());
  }
  return z.real();
}

}  // namespace sparsact
