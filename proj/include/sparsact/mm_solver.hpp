#pragma once

#include <optional>
#include <vector>

#include "sparsact/pg_solver.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

struct MmOptions {
  double gamma = 0.0;
  std::optional<Weights> weights;
  double eps_p = 1e-2;
  double eps_d = 1e-2;
  double rho0 = 1.0;
  double rho_max = 1e9;
  double rho_growth = 5.0;
  double eta_exponent_tighten = 0.9;  // progress branch: eta * rho^-0.9
  double eta_exponent_reset = 0.1;    // stall branch: rho^-0.1
  int max_outer = 100;
  PgOptions inner;  // gamma/weights fields are overridden per solve

  void validate() const;
};

struct MmState {
  CMatrix Lambda;
  double rho = 1.0;
  double eta = 1.0;        // primal-progress target
  double eps_inner = 1.0;  // inner-solve tolerance
  double delta_p = 0.0;
  double delta_d = 0.0;
  int outer_iter = 0;
};

struct MmOuterRecord {
  int outer_iter = 0;
  double delta_p = 0.0;
  double delta_p_normalized = 0.0;
  double delta_d = 0.0;
  double rho = 0.0;
  int inner_iters = 0;
  double objective = 0.0;  // f + gamma g
};

struct MmReport {
  SolveStatus status = SolveStatus::MaxOuter;
  CMatrix Y;
  CMatrix X;
  CMatrix K;
  CMatrix Lambda;
  double f = 0.0;
  double g = 0.0;
  double objective = 0.0;
  double delta_p = 0.0;
  double delta_d = 0.0;
  int outer_iters = 0;
  int total_inner_iters = 0;
  int max_backtracks_seen = 0;
  std::vector<MmOuterRecord> history;
};

struct ScheduleDecision {
  bool stop = false;
  bool update_multiplier = false;
  MmState next;
};

/// One pass of the adaptive multiplier/penalty schedule, applied after
/// the inner solve produced fresh delta_p and delta_d. `violation` is
/// A2(X(Y)) - G for the accepted Y.
ScheduleDecision mm_step_schedule(const MmState& state, const MmOptions& options,
                                  const CMatrix& violation);

/// Method of multipliers for covariance completion: inner PG on
/// F + gamma g, multiplier update, adaptive rho/eta/eps schedule.
/// Default Y0 = Kc Xc from the centralized Riccati solution.
MmReport mm_solve(const PlantModel& model, const CompletionData& data,
                  const MmOptions& options,
                  const std::optional<CMatrix>& Y0 = std::nullopt);

}  // namespace sparsact
