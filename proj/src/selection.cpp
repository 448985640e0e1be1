#include "sparsact/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsact {

std::set<Eigen::Index> support_of(const CMatrix& Y, double tol) {
  if (tol < 0.0) {
    double max_norm = 0.0;
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      max_norm = std::max(max_norm, Y.row(i).norm());
    }
    tol = 1e-6 * max_norm;
  }
  std::set<Eigen::Index> support;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    if (Y.row(i).norm() > tol) support.insert(i);
  }
  return support;
}

Weights reweight(const CMatrix& Y_prev, double eps_rw) {
  if (eps_rw <= 0.0) throw std::invalid_argument("reweight eps must be > 0");
  Eigen::VectorXd w(Y_prev.rows());
  for (Eigen::Index i = 0; i < Y_prev.rows(); ++i) {
    w(i) = 1.0 / (Y_prev.row(i).norm() + eps_rw);
  }
  return Weights{w};
}

double degradation(double J, double J_c) {
  if (J_c <= 0.0) throw std::invalid_argument("J_c must be > 0");
  return 100.0 * (J - J_c) / J_c;
}

PlantModel restrict_columns(const PlantModel& model,
                            const std::set<Eigen::Index>& support) {
  const Eigen::Index q = static_cast<Eigen::Index>(support.size());
  PlantModel reduced = model;
  reduced.B.resize(model.n(), q);
  reduced.R.resize(q, q);
  Eigen::Index col = 0;
  for (Eigen::Index i : support) {
    reduced.B.col(col) = model.B.col(i);
    Eigen::Index row = 0;
    for (Eigen::Index j : support) {
      reduced.R(row, col) = model.R(j, i);
      ++row;
    }
    ++col;
  }
  return reduced;
}

namespace {

// Scatters a reduced q x n gain back to m x n with zero dropped rows.
CMatrix scatter_rows(const CMatrix& reduced, Eigen::Index m,
                     const std::set<Eigen::Index>& support) {
  CMatrix full = CMatrix::Zero(m, reduced.cols());
  Eigen::Index row = 0;
  for (Eigen::Index i : support) {
    full.row(i) = reduced.row(row++);
  }
  return full;
}

PolishResult open_loop_polish(const PlantModel& model) {
  if (spectral_abscissa(model.A) >= 0.0) {
    throw PolishInfeasibleError(
        "empty support with unstable A: no stabilizing gain exists");
  }
  PolishResult out;
  out.X = hermitianize(solve_lyapunov(model.A, model.V));
  out.K = CMatrix::Zero(model.m(), model.n());
  out.J = real_part_checked((model.Q * out.X).trace(), out.X.norm());
  return out;
}

}  // namespace

PolishResult polish(const PlantModel& model,
                    const std::set<Eigen::Index>& support,
                    const std::optional<CompletionData>& data) {
  if (support.empty()) return open_loop_polish(model);
  const PlantModel reduced = restrict_columns(model, support);

  if (data) {
    MmOptions options;
    options.gamma = 0.0;
    MmReport report = mm_solve(reduced, *data, options);
    PolishResult out;
    out.J = report.f;
    out.X = report.X;
    out.K = scatter_rows(report.K, model.m(), support);
    return out;
  }

  AreSolution are;
  try {
    are = solve_are(reduced);
  } catch (const SolverError& e) {
    throw PolishInfeasibleError(
        std::string("reduced pair (A, B_sp) is not stabilizable: ") +
        e.what());
  }
  PolishResult out;
  out.J = real_part_checked((are.P * model.V).trace(),
                            are.P.norm() * model.V.norm());
  out.X = are.Xc;
  out.K = scatter_rows(are.Kc, model.m(), support);
  return out;
}

std::vector<SelectionResult> gamma_sweep(const PlantModel& model,
                                         const std::vector<double>& gammas,
                                         const SweepOptions& options) {
  if (!std::is_sorted(gammas.begin(), gammas.end())) {
    throw std::invalid_argument("gamma grid must be sorted ascending");
  }
  const AreSolution are = solve_are(model);
  const double J_c = real_part_checked((are.P * model.V).trace(),
                                       are.P.norm() * model.V.norm());
  const CMatrix Y_centralized = are.Kc * are.Xc;

  std::vector<SelectionResult> results;
  CMatrix Y_warm = Y_centralized;
  for (double gamma : gammas) {
    SelectionResult res;
    res.gamma = gamma;
    res.J_c = J_c;
    try {
      CMatrix Y_start = options.warm_start ? Y_warm : Y_centralized;
      Weights weights = Weights::ones(model.m());
      SolveReport report;
      const int rounds = std::max(1, options.reweight_steps);
      for (int r = 0; r < rounds; ++r) {
        PgOptions pg = options.pg;
        pg.gamma = gamma;
        pg.weights = weights;
        report = pg_solve(model, pg, Y_start);
        Y_start = report.Y;
        weights = reweight(report.Y, options.reweight_eps);
        res.pg_iters += report.iters;
      }
      res.status = report.status;
      res.Y = report.Y;
      res.history = report.history;
      res.support = support_of(report.Y, options.support_tol);
      const PolishResult polished = polish(model, res.support);
      res.J = polished.J;
      res.K = polished.K;
      res.X = polished.X;
      res.degradation_pct = degradation(res.J, J_c);
      if (options.warm_start) Y_warm = report.Y;
    } catch (const std::exception& e) {
      res.error = e.what();
      res.status = SolveStatus::BacktrackFail;
    }
    results.push_back(std::move(res));
  }
  return results;
}

double subset_cost(const PlantModel& model,
                   const std::set<Eigen::Index>& support) {
  try {
    if (support.empty()) {
      return open_loop_polish(model).J;
    }
    const AreSolution are = solve_are(restrict_columns(model, support));
    return real_part_checked((are.P * model.V).trace(),
                             are.P.norm() * model.V.norm());
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

GreedyTrace greedy_select(const PlantModel& model) {
  GreedyTrace trace;
  std::set<Eigen::Index> active;
  for (Eigen::Index i = 0; i < model.m(); ++i) active.insert(i);

  while (!active.empty()) {
    Eigen::Index best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (Eigen::Index e : active) {  // ascending, so ties keep lowest index
      std::set<Eigen::Index> candidate = active;
      candidate.erase(e);
      const double cost = subset_cost(model, candidate);
      if (cost < best_cost) {
        best_cost = cost;
        best = e;
      }
    }
    if (best < 0 || std::isinf(best_cost)) break;
    active.erase(best);
    trace.removal_order.push_back(best);
    trace.costs.push_back(best_cost);
  }
  trace.retained = active;
  return trace;
}

PlantModel sensor_dual(const CMatrix& A_s, const CMatrix& C, const CMatrix& V_d,
                       const CMatrix& V_eta) {
  if (A_s.rows() != A_s.cols()) throw DimensionError("A_s must be square");
  if (C.cols() != A_s.rows()) throw DimensionError("C must have n columns");
  try {
    stabilizing_gain(A_s.adjoint(), C.adjoint());
  } catch (const SolverError&) {
    throw SolverError("(A_s, C) is not observable (dual pair not stabilizable)");
  }
  PlantModel dual;
  dual.A = A_s.adjoint();
  dual.B = C.adjoint();
  dual.C = CMatrix::Identity(A_s.rows(), A_s.rows());
  dual.V = hermitianize(C.adjoint() * C);
  dual.Q = hermitianize(V_d);
  dual.R = hermitianize(V_eta);
  dual.validate(/*require_v_pd=*/false);
  return dual;
}

}  // namespace sparsact
