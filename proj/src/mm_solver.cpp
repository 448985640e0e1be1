#include "sparsact/mm_solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace sparsact {

void MmOptions::validate() const {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (eps_p <= 0.0 || eps_d <= 0.0) {
    throw std::invalid_argument("outer tolerances must be positive");
  }
  if (rho0 <= 0.0 || rho_max < rho0) {
    throw std::invalid_argument("need 0 < rho0 <= rho_max");
  }
  if (rho_growth <= 1.0) throw std::invalid_argument("rho_growth must be > 1");
  if (max_outer <= 0) throw std::invalid_argument("max_outer must be > 0");
}

ScheduleDecision mm_step_schedule(const MmState& state, const MmOptions& options,
                                  const CMatrix& violation) {
  ScheduleDecision out;
  out.next = state;
  out.next.outer_iter = state.outer_iter + 1;
  if (state.delta_p <= state.eta) {
    if (state.delta_p <= options.eps_p && state.delta_d <= options.eps_d) {
      out.stop = true;
      return out;
    }
    out.update_multiplier = true;
    out.next.Lambda = state.Lambda + state.rho * violation;
    out.next.rho = state.rho;
    out.next.eta = std::max(
        state.eta * std::pow(out.next.rho, -options.eta_exponent_tighten),
        options.eps_p);
    out.next.eps_inner =
        std::max(state.eps_inner / out.next.rho, options.eps_d);
  } else {
    out.next.Lambda = state.Lambda;
    out.next.rho = std::min(options.rho_growth * state.rho, options.rho_max);
    out.next.eta = std::max(
        std::pow(out.next.rho, -options.eta_exponent_reset), options.eps_p);
    out.next.eps_inner = std::max(1.0 / out.next.rho, options.eps_d);
  }
  return out;
}

MmReport mm_solve(const PlantModel& model, const CompletionData& data,
                  const MmOptions& options,
                  const std::optional<CMatrix>& Y0) {
  options.validate();
  data.validate(model.p());
  const Weights weights = options.weights.value_or(Weights::ones(model.m()));

  CMatrix Y;
  if (Y0) {
    Y = *Y0;
  } else {
    const AreSolution are = solve_are(model);
    Y = are.Kc * are.Xc;
  }

  MmState state;
  state.Lambda = CMatrix::Zero(model.p(), model.p());
  state.rho = options.rho0;
  state.eta = std::pow(options.rho0, -options.eta_exponent_reset);
  state.eps_inner = 1.0 / options.rho0;

  const double g_norm = data.G.norm();
  MmReport report;
  report.status = SolveStatus::MaxOuter;

  for (int k = 0; k < options.max_outer; ++k) {
    AugmentedLagrangianCost smooth(model, data,
                                   MultiplierState{state.Lambda, state.rho});
    PgOptions inner = options.inner;
    inner.gamma = options.gamma;
    inner.weights = weights;
    inner.eps = std::max(state.eps_inner, options.inner.eps);

    SolveReport inner_report;
    try {
      inner_report = pg_solve_smooth(smooth, inner, Y);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "inner PG solve failed at outer iteration " << k << ": "
         << e.what();
      throw SolverError(os.str());
    }
    if (inner_report.status == SolveStatus::BacktrackFail) {
      std::ostringstream os;
      os << "inner PG backtracking failed at outer iteration " << k
         << " (rho = " << state.rho << ")";
      throw SolverError(os.str());
    }

    Y = inner_report.Y;
    const CMatrix viol = smooth.violation(inner_report.X);
    state.delta_p = viol.norm();
    state.delta_d = std::min(inner_report.r_r, inner_report.r_n);

    report.Y = inner_report.Y;
    report.X = inner_report.X;
    report.K = inner_report.K;
    report.f = QuadraticCost(model).value(inner_report.Y, inner_report.X);
    report.g = inner_report.g;
    report.objective = report.f + options.gamma * report.g;
    report.delta_p = state.delta_p;
    report.delta_d = state.delta_d;
    report.outer_iters = k + 1;
    report.total_inner_iters += inner_report.iters;
    report.max_backtracks_seen =
        std::max(report.max_backtracks_seen, inner_report.max_backtracks_seen);

    MmOuterRecord rec;
    rec.outer_iter = k + 1;
    rec.delta_p = state.delta_p;
    rec.delta_p_normalized = g_norm > 0.0 ? state.delta_p / g_norm : state.delta_p;
    rec.delta_d = state.delta_d;
    rec.rho = state.rho;
    rec.inner_iters = inner_report.iters;
    rec.objective = report.objective;
    report.history.push_back(rec);

    const ScheduleDecision decision = mm_step_schedule(state, options, viol);
    if (decision.stop) {
      report.status = SolveStatus::Converged;
      report.Lambda = state.Lambda;
      return report;
    }
    state = decision.next;
  }

  report.Lambda = state.Lambda;
  return report;
}

}  // namespace sparsact
