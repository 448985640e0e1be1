#pragma once

#include <Eigen/Dense>

#include "sparsact/linalg.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

/// Positive row weights for the group-sparsity regularizer.
struct Weights {
  Eigen::VectorXd w;

  static Weights ones(Eigen::Index m) {
    return Weights{Eigen::VectorXd::Ones(m)};
  }
  void validate(Eigen::Index m) const;
};

/// Lagrange multiplier and penalty parameter of the augmented
/// Lagrangian.
struct MultiplierState {
  CMatrix Lambda;  // p x p
  double rho = 1.0;
};

/// Smoothness and strong-convexity constants of f over the sublevel
/// set D(a), plus the covariance lower bound nu I <= X(Y).
struct SublevelBounds {
  double a = 0.0;
  double nu = 0.0;
  double L_a = 0.0;
  double mu_a = 0.0;
};

/// f(Y) = trace(Q X(Y) + Y^* R Y X^{-1}(Y)).
/// Throws InfeasibleYError when X(Y) is not positive definite.
double eval_f(const PlantModel& model, const CMatrix& Y);

/// grad f = 2 R Y X^{-1} - 2 B^* (W2 - W1), with W1, W2 from the two
/// adjoint Lyapunov equations.
CMatrix grad_f(const PlantModel& model, const CMatrix& Y);

/// g(Y) = sum_i w_i ||e_i^* Y||_2.
double eval_g(const CMatrix& Y, const Weights& weights);

/// Row soft-thresholding: the proximal operator of beta * g.
CMatrix prox_group_rows(const CMatrix& V, double beta, const Weights& weights);

/// Smooth part of the augmented Lagrangian:
/// F(Y) = f(Y) + Re<Lambda, A2(X) - G> + (rho/2) ||A2(X) - G||_F^2.
double eval_F(const PlantModel& model, const CompletionData& data,
              const CMatrix& Y, const MultiplierState& mult);
CMatrix grad_F(const PlantModel& model, const CompletionData& data,
               const CMatrix& Y, const MultiplierState& mult);

/// <D, Hess f(Y) D> = 2 ||R^{1/2} (D - Y X^{-1} M(D)) X^{-1/2}||_F^2
/// with M(D) = A1^{-1}(B(D)).
double hessian_quadratic_form(const PlantModel& model, const CMatrix& Y,
                              const CMatrix& D);

/// Computes nu, L_a, mu_a for the sublevel value a. Requires Q > 0.
SublevelBounds sublevel_bounds(const PlantModel& model, double a);

/// Frobenius distance from -grad to gamma * dg(Y), computed row-wise
/// for the weighted group norm. Zero at a stationary point.
double stationarity_gap(const CMatrix& grad, const CMatrix& Y, double gamma,
                        const Weights& weights);

/// Evaluation engine that caches the Schur factorization of A and the
/// Y-independent Lyapunov solves. One instance serves a whole solver
/// run; the free functions above rebuild it per call.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual const PlantModel& model() const = 0;
  virtual const LyapunovSolver& lyapunov() const = 0;
  /// X(Y), not Hermitianized beyond the solver's own symmetrization.
  CMatrix x(const CMatrix& Y) const;
  virtual double value(const CMatrix& Y, const CMatrix& X) const = 0;
  virtual CMatrix gradient(const CMatrix& Y, const CMatrix& X) const = 0;
};

/// f(Y) for actuator selection.
class QuadraticCost final : public SmoothObjective {
 public:
  explicit QuadraticCost(const PlantModel& model);
  const PlantModel& model() const override { return *model_; }
  const LyapunovSolver& lyapunov() const override { return lyap_; }
  double value(const CMatrix& Y, const CMatrix& X) const override;
  CMatrix gradient(const CMatrix& Y, const CMatrix& X) const override;

 private:
  const PlantModel* model_;
  LyapunovSolver lyap_;
  CMatrix W2_;  // solves A^* W + W A + Q = 0
};

/// F(Y) for the covariance-completion inner problem; Lambda and rho are
/// fixed for the lifetime of the engine.
class AugmentedLagrangianCost final : public SmoothObjective {
 public:
  AugmentedLagrangianCost(const PlantModel& model, const CompletionData& data,
                          MultiplierState mult);
  const PlantModel& model() const override { return *model_; }
  const LyapunovSolver& lyapunov() const override { return lyap_; }
  double value(const CMatrix& Y, const CMatrix& X) const override;
  CMatrix gradient(const CMatrix& Y, const CMatrix& X) const override;

  /// A2(X) - G.
  CMatrix violation(const CMatrix& X) const;

 private:
  const PlantModel* model_;
  const CompletionData* data_;
  MultiplierState mult_;
  LyapunovSolver lyap_;
  CMatrix W2_;  // solves A^* W + W A + Q + A2^dagger(Lambda) = 0
};

}  // namespace sparsact
