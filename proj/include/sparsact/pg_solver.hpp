#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sparsact/objective.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

enum class SolveStatus { Converged, MaxIters, BacktrackFail, MaxOuter };

const char* to_string(SolveStatus status);

struct PgOptions {
  double gamma = 0.0;
  std::optional<Weights> weights;  // default: all ones
  double eps = 1e-4;
  double eps_r = 1e-8;
  double eps_n = 1e-8;
  double backtrack_c = 0.5;
  int max_iters = 10000;
  int max_backtracks = 60;
  double alpha_00 = 1.0;
  /// When positive, every iteration backtracks from this value instead
  /// of the BB estimate (used for fixed-step convergence experiments).
  double fixed_step = 0.0;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;  // f + gamma g
  double f = 0.0;
  double g = 0.0;
  double alpha = 0.0;
  double r_r = 0.0;
  double r_n = 0.0;
  int backtracks = 0;
  int nnz_rows = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  CMatrix Y;
  CMatrix X;
  CMatrix K;  // Y X^{-1}
  CMatrix grad;
  double f = 0.0;
  double g = 0.0;
  double objective = 0.0;
  double r_r = 1.0;
  double r_n = 1.0;
  int iters = 0;
  int max_backtracks_seen = 0;
  std::vector<IterationRecord> history;
};

/// Observes accepted iterates; must not mutate solver state.
using IterationCallback = std::function<void(const IterationRecord&)>;

/// Differences of successive iterates/gradients, exposed for tests.
/// Returns the BB initial step alpha_{k,0}; falls back to `alpha_prev`
/// on negative curvature or a zero denominator.
double bb_initial_step(const CMatrix& delta_y, const CMatrix& delta_grad,
                       double alpha_prev);

/// Proximal-gradient loop on the composite smooth(Y) + gamma g(Y),
/// reused by the method of multipliers with the augmented Lagrangian as
/// the smooth part. Y0 must satisfy X(Y0) > 0.
SolveReport pg_solve_smooth(const SmoothObjective& smooth,
                            const PgOptions& options, const CMatrix& Y0,
                            const IterationCallback& callback = nullptr);

/// Actuator-selection solve of f + gamma g. Default Y0 = Kc Xc from the
/// centralized Riccati solution.
SolveReport pg_solve(const PlantModel& model, const PgOptions& options,
                     const std::optional<CMatrix>& Y0 = std::nullopt,
                     const IterationCallback& callback = nullptr);

}  // namespace sparsact
