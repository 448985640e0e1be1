#include "sparsact/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace sparsact {

namespace {

Eigen::LLT<CMatrix> feasible_llt(const CMatrix& X) {
  Eigen::LLT<CMatrix> llt(hermitianize(X));
  if (!X.allFinite() || llt.info() != Eigen::Success) {
    throw InfeasibleYError("X(Y) is not positive definite");
  }
  return llt;
}

double trace_re(const CMatrix& M, double scale) {
  return real_part_checked(M.trace(), scale);
}

// f(Y) given X = X(Y) and its Cholesky factorization.
double f_value(const PlantModel& model, const CMatrix& Y, const CMatrix& X,
               const Eigen::LLT<CMatrix>& llt) {
  const double scale = X.norm() + Y.norm();
  const double term_q = trace_re(model.Q * X, scale);
  const CMatrix YXinv = llt.solve(Y.adjoint()).adjoint();  // Y X^{-1}
  const double term_r = trace_re(model.R * YXinv * Y.adjoint(), scale);
  return term_q + term_r;
}

// 2 R Y X^{-1} - 2 B^* (W2 - W1); W2 is the Y-independent part.
CMatrix f_gradient(const PlantModel& model, const LyapunovSolver& lyap,
                   const CMatrix& W2, const CMatrix& Y, const CMatrix& X) {
  const Eigen::LLT<CMatrix> llt = feasible_llt(X);
  const CMatrix YXinv = llt.solve(Y.adjoint()).adjoint();
  const CMatrix W1 =
      lyap.solve_adjoint(hermitianize(YXinv.adjoint() * model.R * YXinv));
  return 2.0 * model.R * YXinv - 2.0 * model.B.adjoint() * (W2 - W1);
}

// Largest singular value of a real-linear map on C^{m x n}, by power
// iteration on T^dagger T. `step` must evaluate Y -> T^dagger(T(Y)) and
// return the squared image norm ||T(Y)||_F^2 through `tsq`.
template <typename Step>
double operator_norm_power(Eigen::Index m, Eigen::Index n, Step step) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CMatrix Y(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Y(i, j) = Complex(unif(rng), unif(rng));
    }
  }
  Y /= Y.norm();
  double sigma_sq = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    double tsq = 0.0;
    CMatrix next = step(Y, tsq);
    const double estimate = tsq;  // ||T(Y)||^2 for unit Y
    const double change = std::abs(estimate - sigma_sq);
    sigma_sq = estimate;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    Y = next / norm;
    if (iter > 2 && change <= 1e-6 * (1.0 + sigma_sq)) break;
  }
  return std::sqrt(sigma_sq);
}

double min_eigenvalue(const CMatrix& M) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitianize(M));
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const CMatrix& M) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitianize(M));
  return es.eigenvalues().maxCoeff();
}

double matrix_2norm(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

}  // namespace

void Weights::validate(Eigen::Index m) const {
  if (w.size() != m) throw DimensionError("weights must have length m");
  if ((w.array() <= 0.0).any()) {
    throw std::invalid_argument("weights must be positive");
  }
}

CMatrix SmoothObjective::x(const CMatrix& Y) const {
  return x_of_y(model(), lyapunov(), Y);
}

QuadraticCost::QuadraticCost(const PlantModel& model)
    : model_(&model), lyap_(model.A) {
  W2_ = lyap_.solve_adjoint(hermitianize(model.Q));
}

double QuadraticCost::value(const CMatrix& Y, const CMatrix& X) const {
  return f_value(*model_, Y, X, feasible_llt(X));
}

CMatrix QuadraticCost::gradient(const CMatrix& Y, const CMatrix& X) const {
  return f_gradient(*model_, lyap_, W2_, Y, X);
}

AugmentedLagrangianCost::AugmentedLagrangianCost(const PlantModel& model,
                                                 const CompletionData& data,
                                                 MultiplierState mult)
    : model_(&model), data_(&data), mult_(std::move(mult)), lyap_(model.A) {
  const CMatrix forcing =
      model.Q + apply_A2_adjoint(model.C, data.E, mult_.Lambda);
  W2_ = lyap_.solve_adjoint(hermitianize(forcing));
}

CMatrix AugmentedLagrangianCost::violation(const CMatrix& X) const {
  return apply_A2(model_->C, data_->E, X) - data_->G;
}

double AugmentedLagrangianCost::value(const CMatrix& Y,
                                      const CMatrix& X) const {
  const double f = f_value(*model_, Y, X, feasible_llt(X));
  const CMatrix viol = violation(X);
  const double lag = real_inner(mult_.Lambda, viol);
  return f + lag + 0.5 * mult_.rho * viol.squaredNorm();
}

CMatrix AugmentedLagrangianCost::gradient(const CMatrix& Y,
                                          const CMatrix& X) const {
  // W3 carries the penalty term and depends on the current violation.
  const CMatrix W3 = lyap_.solve_adjoint(
      hermitianize(apply_A2_adjoint(model_->C, data_->E, violation(X))));
  return f_gradient(*model_, lyap_, W2_ + mult_.rho * W3, Y, X);
}

double eval_f(const PlantModel& model, const CMatrix& Y) {
  QuadraticCost cost(model);
  return cost.value(Y, cost.x(Y));
}

CMatrix grad_f(const PlantModel& model, const CMatrix& Y) {
  QuadraticCost cost(model);
  return cost.gradient(Y, cost.x(Y));
}

double eval_g(const CMatrix& Y, const Weights& weights) {
  weights.validate(Y.rows());
  double g = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    g += weights.w(i) * Y.row(i).norm();
  }
  return g;
}

CMatrix prox_group_rows(const CMatrix& V, double beta, const Weights& weights) {
  weights.validate(V.rows());
  if (beta < 0.0) throw std::invalid_argument("prox threshold must be >= 0");
  CMatrix out = V;
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    const double norm = V.row(i).norm();
    const double threshold = beta * weights.w(i);
    if (norm > threshold) {
      out.row(i) *= 1.0 - threshold / norm;
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

double eval_F(const PlantModel& model, const CompletionData& data,
              const CMatrix& Y, const MultiplierState& mult) {
  AugmentedLagrangianCost cost(model, data, mult);
  return cost.value(Y, cost.x(Y));
}

CMatrix grad_F(const PlantModel& model, const CompletionData& data,
               const CMatrix& Y, const MultiplierState& mult) {
  AugmentedLagrangianCost cost(model, data, mult);
  return cost.gradient(Y, cost.x(Y));
}

double hessian_quadratic_form(const PlantModel& model, const CMatrix& Y,
                              const CMatrix& D) {
  LyapunovSolver lyap(model.A);
  const CMatrix X = x_of_y(model, lyap, Y);
  const Eigen::LLT<CMatrix> llt = feasible_llt(X);
  // M(D) = A1^{-1}(B(D))
  const CMatrix MD = lyap.solve(-apply_B(model.B, D));
  const CMatrix T = D - llt.solve(Y.adjoint()).adjoint() * MD;
  // 2 trace(T^* R T X^{-1})
  const CMatrix RT = model.R * T;
  const CMatrix XinvTadj = llt.solve(T.adjoint());
  const double val =
      2.0 * real_part_checked((RT * XinvTadj).trace(), T.norm() + 1.0);
  return val;
}

SublevelBounds sublevel_bounds(const PlantModel& model, double a) {
  if (a <= 0.0) throw std::invalid_argument("sublevel value a must be > 0");
  const double lmin_q = min_eigenvalue(model.Q);
  if (lmin_q <= 0.0) {
    throw BoundUnavailableError(
        "sublevel bounds require Q > 0 (formulas divide by lambda_min(Q))");
  }
  const double lmin_r = min_eigenvalue(model.R);
  const double lmax_r = max_eigenvalue(model.R);
  const double lmin_v = min_eigenvalue(model.V);
  if (lmin_r <= 0.0 || lmin_v <= 0.0) {
    throw BoundUnavailableError("sublevel bounds require R > 0 and V > 0");
  }

  const double norm_a = matrix_2norm(model.A);
  const double norm_b = matrix_2norm(model.B);

  SublevelBounds out;
  out.a = a;
  const double denom =
      norm_a / std::sqrt(lmin_q) + norm_b / std::sqrt(lmin_r);
  out.nu = lmin_v * lmin_v / (4.0 * a) / (denom * denom);

  // Operator norms of the linear maps B and A1^{-1} B, by power
  // iteration with the real inner product Re trace(M1^* M2).
  LyapunovSolver lyap(model.A);
  const Eigen::Index m = model.m();
  const Eigen::Index n = model.n();
  const double norm_bmap =
      operator_norm_power(m, n, [&](const CMatrix& Y, double& tsq) {
        const CMatrix TY = apply_B(model.B, Y);
        tsq = TY.squaredNorm();
        return CMatrix(2.0 * model.B.adjoint() * TY);
      });
  const double norm_mmap =
      operator_norm_power(m, n, [&](const CMatrix& Y, double& tsq) {
        const CMatrix S = lyap.solve(-apply_B(model.B, Y));
        tsq = S.squaredNorm();
        const CMatrix Z = lyap.solve_adjoint(-S);
        return CMatrix(2.0 * model.B.adjoint() * Z);
      });

  const double l_inner =
      1.0 + std::sqrt(a) * norm_mmap / std::sqrt(out.nu * lmin_r);
  out.L_a = 2.0 * lmax_r / out.nu * l_inner * l_inner;

  const double mu_inner =
      std::sqrt(a) +
      a * a * norm_bmap / (lmin_q * lmin_v * std::sqrt(out.nu * lmin_r));
  out.mu_a = 2.0 * lmin_r * lmin_q / (mu_inner * mu_inner);
  return out;
}

double stationarity_gap(const CMatrix& grad, const CMatrix& Y, double gamma,
                        const Weights& weights) {
  weights.validate(Y.rows());
  if (grad.rows() != Y.rows() || grad.cols() != Y.cols()) {
    throw DimensionError("gradient and Y shapes differ");
  }
  double gap_sq = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const double row_norm = Y.row(i).norm();
    const double gw = gamma * weights.w(i);
    if (row_norm > 0.0) {
      // dg row is the single point gw * y_i / ||y_i||
      gap_sq += (grad.row(i) + gw / row_norm * Y.row(i)).squaredNorm();
    } else {
      // dg row is the ball of radius gw
      const double excess = std::max(0.0, grad.row(i).norm() - gw);
      gap_sq += excess * excess;
    }
  }
  return std::sqrt(gap_sq);
}

}  // namespace sparsact
