#include "sparsact/pg_solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <utility>

namespace sparsact {

namespace {

int count_nonzero_rows(const CMatrix& Y) {
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    max_norm = std::max(max_norm, Y.row(i).norm());
  }
  const double tol = 1e-6 * max_norm;
  int count = 0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    if (Y.row(i).norm() > tol) ++count;
  }
  return count;
}

struct Candidate {
  CMatrix Y;
  CMatrix X;
  double f = 0.0;
  double alpha = 0.0;
  int backtracks = 0;
};

// Largest feasible step in {c^j alpha0}: the candidate must keep
// X(Y) > 0 and satisfy the sufficient-descent inequality.
std::optional<Candidate> backtrack(const SmoothObjective& smooth,
                                   const CMatrix& Y, const CMatrix& grad,
                                   double f_value, double alpha0, double gamma,
                                   const Weights& weights,
                                   const PgOptions& options) {
  double alpha = alpha0;
  for (int j = 0; j <= options.max_backtracks; ++j, alpha *= options.backtrack_c) {
    Candidate cand;
    cand.Y = prox_group_rows(Y - alpha * grad, gamma * alpha, weights);
    cand.alpha = alpha;
    cand.backtracks = j;
    CMatrix X;
    try {
      X = smooth.x(cand.Y);
    } catch (const SingularOperatorError&) {
      throw;  // A is fixed during a solve; this cannot be stepped over
    }
    if (!is_positive_definite(X)) continue;
    cand.X = std::move(X);
    double f_next;
    try {
      f_next = smooth.value(cand.Y, cand.X);
    } catch (const InfeasibleYError&) {
      continue;
    }
    const CMatrix step = cand.Y - Y;
    const double bound =
        f_value + real_inner(grad, step) + step.squaredNorm() / (2.0 * alpha);
    if (f_next <= bound + 1e-12 * (1.0 + std::abs(bound))) {
      cand.f = f_next;
      return cand;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max-iterations";
    case SolveStatus::BacktrackFail: return "backtrack-failure";
    case SolveStatus::MaxOuter: return "max-outer-iterations";
  }
  return "unknown";
}

void PgOptions::validate() const {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (eps <= 0.0 || eps_r <= 0.0 || eps_n <= 0.0) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (backtrack_c <= 0.0 || backtrack_c >= 1.0) {
    throw std::invalid_argument("backtracking constant must lie in (0, 1)");
  }
  if (max_iters <= 0 || max_backtracks <= 0) {
    throw std::invalid_argument("iteration limits must be positive");
  }
  if (alpha_00 <= 0.0) throw std::invalid_argument("alpha_00 must be > 0");
  if (fixed_step < 0.0) throw std::invalid_argument("fixed_step must be >= 0");
}

double bb_initial_step(const CMatrix& delta_y, const CMatrix& delta_grad,
                       double alpha_prev) {
  const double yy = real_inner(delta_y, delta_y);
  const double yg = real_inner(delta_y, delta_grad);
  const double gg = real_inner(delta_grad, delta_grad);
  if (yg <= 0.0 || yy == 0.0 || gg == 0.0) {
    return alpha_prev;  // negative curvature or degenerate differences
  }
  const double alpha_s = yy / yg;
  const double alpha_m = yg / gg;
  if (alpha_s < 0.0 || alpha_m < 0.0) return alpha_prev;
  if (alpha_m / alpha_s > 0.5) return alpha_m;
  return alpha_s - 0.5 * alpha_m;
}

SolveReport pg_solve_smooth(const SmoothObjective& smooth,
                            const PgOptions& options, const CMatrix& Y0,
                            const IterationCallback& callback) {
  options.validate();
  const PlantModel& model = smooth.model();
  const Weights weights =
      options.weights.value_or(Weights::ones(model.m()));
  weights.validate(model.m());

  SolveReport report;
  report.Y = Y0;
  report.X = smooth.x(Y0);
  if (!is_positive_definite(report.X)) {
    throw InfeasibleYError("initial Y0 has X(Y0) not positive definite");
  }
  report.f = smooth.value(report.Y, report.X);
  report.g = eval_g(report.Y, weights);
  report.objective = report.f + options.gamma * report.g;
  report.grad = smooth.gradient(report.Y, report.X);

  double alpha_prev = options.alpha_00;
  double r1_norm = 0.0;
  report.status = SolveStatus::MaxIters;

  for (int k = 0; k < options.max_iters; ++k) {
    double alpha0;
    if (options.fixed_step > 0.0) {
      alpha0 = options.fixed_step;
    } else if (k == 0) {
      alpha0 = options.alpha_00;
    } else {
      alpha0 = alpha_prev;  // set below from BB differences
    }

    auto cand = backtrack(smooth, report.Y, report.grad, report.f, alpha0,
                          options.gamma, weights, options);
    if (!cand) {
      report.status = SolveStatus::BacktrackFail;
      break;
    }
    report.max_backtracks_seen =
        std::max(report.max_backtracks_seen, cand->backtracks);

    const CMatrix grad_new = smooth.gradient(cand->Y, cand->X);
    // r = grad(Y^{k+1}) + (Yhat - Y^{k+1}) / alpha,
    // Yhat = Y^k - alpha grad(Y^k)
    const CMatrix prox_residual =
        (report.Y - cand->alpha * report.grad - cand->Y) / cand->alpha;
    const CMatrix r = grad_new + prox_residual;
    const double r_norm = r.norm();
    if (k == 0) r1_norm = r_norm;
    const double r_r =
        r_norm /
        (std::max(grad_new.norm(), prox_residual.norm()) + options.eps_r);
    const double r_n = r_norm / (r1_norm + options.eps_n);

    const CMatrix delta_y = cand->Y - report.Y;
    const CMatrix delta_grad = grad_new - report.grad;

    report.Y = std::move(cand->Y);
    report.X = std::move(cand->X);
    report.f = cand->f;
    report.g = eval_g(report.Y, weights);
    report.objective = report.f + options.gamma * report.g;
    report.grad = grad_new;
    report.r_r = r_r;
    report.r_n = r_n;
    report.iters = k + 1;

    IterationRecord rec;
    rec.iter = k + 1;
    rec.objective = report.objective;
    rec.f = report.f;
    rec.g = report.g;
    rec.alpha = cand->alpha;
    rec.r_r = r_r;
    rec.r_n = r_n;
    rec.backtracks = cand->backtracks;
    rec.nnz_rows = count_nonzero_rows(report.Y);
    report.history.push_back(rec);
    if (callback) callback(rec);

    if (r_r <= options.eps || r_n <= options.eps) {
      report.status = SolveStatus::Converged;
      break;
    }

    alpha_prev = bb_initial_step(delta_y, delta_grad, cand->alpha);
  }

  // K = Y X^{-1} from the last feasible iterate.
  Eigen::LLT<CMatrix> llt(hermitianize(report.X));
  report.K = llt.solve(report.Y.adjoint()).adjoint();
  return report;
}

SolveReport pg_solve(const PlantModel& model, const PgOptions& options,
                     const std::optional<CMatrix>& Y0,
                     const IterationCallback& callback) {
  QuadraticCost smooth(model);
  CMatrix start;
  if (Y0) {
    start = *Y0;
  } else {
    const AreSolution are = solve_are(model);
    start = are.Kc * are.Xc;
  }
  return pg_solve_smooth(smooth, options, start, callback);
}

}  // namespace sparsact
