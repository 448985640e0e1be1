#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sparsact/mm_solver.hpp"
#include "sparsact/pg_solver.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

struct SelectionResult {
  double gamma = 0.0;
  std::set<Eigen::Index> support;  // retained row indices of Y
  CMatrix Y;
  CMatrix K;
  CMatrix X;
  double J = 0.0;    // polished cost
  double J_c = 0.0;  // centralized cost trace(P V)
  double degradation_pct = 0.0;
  int pg_iters = 0;
  SolveStatus status = SolveStatus::Converged;
  std::string error;  // nonempty when the solve for this gamma failed
  std::vector<IterationRecord> history;
};

struct GreedyTrace {
  std::vector<Eigen::Index> removal_order;
  std::vector<double> costs;  // cost after each removal
  std::set<Eigen::Index> retained;
};

/// Rows of Y with Euclidean norm above tol. Negative tol selects the
/// default 1e-6 * max row norm.
std::set<Eigen::Index> support_of(const CMatrix& Y, double tol = -1.0);

/// w_i = 1 / (||e_i^* Y||_2 + eps_rw).
Weights reweight(const CMatrix& Y_prev, double eps_rw = 1e-3);

/// (J - J_c) / J_c in percent.
double degradation(double J, double J_c);

/// Restriction of the model to the actuator columns in `support`.
PlantModel restrict_columns(const PlantModel& model,
                            const std::set<Eigen::Index>& support);

struct PolishResult {
  double J = 0.0;
  CMatrix K;  // m x n, zero on dropped rows
  CMatrix X;
};

/// Re-solves the unregularized problem on the retained columns of B.
/// Actuator mode solves the reduced Riccati equation; completion mode
/// (data present) reruns MM with gamma = 0 on the reduced B.
PolishResult polish(const PlantModel& model,
                    const std::set<Eigen::Index>& support,
                    const std::optional<CompletionData>& data = std::nullopt);

struct SweepOptions {
  PgOptions pg;             // gamma field overridden per grid point
  int reweight_steps = 3;   // pg_solve rounds per gamma
  double reweight_eps = 1e-3;
  double support_tol = -1.0;  // default: 1e-6 * max row norm
  bool warm_start = true;
};

/// Solves the actuator-selection problem across a sorted ascending
/// gamma grid with iterative reweighting and polishing. Failures are
/// recorded per gamma; the sweep continues.
std::vector<SelectionResult> gamma_sweep(const PlantModel& model,
                                         const std::vector<double>& gammas,
                                         const SweepOptions& options);

/// Greedy baseline: repeatedly removes the actuator whose removal
/// increases the Riccati cost the least; stops when every removal
/// leaves a non-stabilizable pair or the set is empty. Ties break to
/// the lowest index.
GreedyTrace greedy_select(const PlantModel& model);

/// Riccati cost trace(P V) for the actuator subset, +inf when the
/// reduced pair is not stabilizable.
double subset_cost(const PlantModel& model,
                   const std::set<Eigen::Index>& support);

/// Sensor-selection dual: maps (A_s, C, V_d, V_eta) to the actuator
/// problem with A = A_s^*, B = C^*, Q = V_d, V = C^* C, R = V_eta.
/// Observer results are recovered as X and L = K^*.
PlantModel sensor_dual(const CMatrix& A_s, const CMatrix& C, const CMatrix& V_d,
                       const CMatrix& V_eta);

}  // namespace sparsact
