#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sparsact/pg_solver.hpp"
#include "sparsact/problems.hpp"

using namespace sparsact;

namespace {

PlantModel scalar_model() {
  PlantModel model;
  model.A = CMatrix::Constant(1, 1, Complex(-1.0));
  model.B = CMatrix::Constant(1, 1, Complex(1.0));
  model.C = CMatrix::Identity(1, 1);
  model.V = CMatrix::Constant(1, 1, Complex(2.0));
  model.Q = CMatrix::Identity(1, 1);
  model.R = CMatrix::Identity(1, 1);
  return model;
}

}  // namespace

TEST_CASE("BB step selection rules") {
  CMatrix dy = CMatrix::Constant(1, 1, Complex(2.0));

  // Collinear with positive curvature c: both quotients equal 1/c.
  CHECK(bb_initial_step(dy, 4.0 * dy, 0.7) == doctest::Approx(0.25));

  // alpha_s = 1, alpha_m = 0.4 -> ratio below 1/2 -> 1 - 0.2 = 0.8.
  CMatrix dy2(1, 2), dg2(1, 2);
  dy2 << Complex(1.0), Complex(0.0);
  dg2 << Complex(1.0), Complex(1.5);
  // <dy,dg> = 1, <dy,dy> = 1, <dg,dg> = 3.25 -> alpha_s = 1, alpha_m = 4/13.
  // Use a cleaner pair instead: dg = [1, sqrt(1.5)] gives alpha_m = 0.4.
  dg2(0, 1) = Complex(std::sqrt(1.5));
  CHECK(bb_initial_step(dy2, dg2, 0.7) == doctest::Approx(1.0 - 0.2));

  // Negative curvature falls back to the previous step.
  CHECK(bb_initial_step(dy, -dy, 0.7) == doctest::Approx(0.7));
  // Degenerate differences too.
  CHECK(bb_initial_step(CMatrix::Zero(1, 1), CMatrix::Zero(1, 1), 0.7) ==
        doctest::Approx(0.7));
}

TEST_CASE("gamma=0 solve matches the Riccati optimum") {
  const PlantModel model = scalar_model();
  PgOptions options;
  options.gamma = 0.0;
  options.eps = 1e-8;
  const SolveReport report = pg_solve(model, options);
  CHECK(report.status == SolveStatus::Converged);
  const double root2 = std::numbers::sqrt2;
  CHECK(report.f == doctest::Approx(2.0 * (root2 - 1.0)).epsilon(1e-8));
  CHECK(std::abs(report.K(0, 0) - Complex(root2 - 1.0)) < 1e-6);
  CHECK(std::min(report.r_r, report.r_n) <= options.eps);
}

TEST_CASE("huge gamma zeroes every row") {
  const PlantModel model = random_stable_model(5, 5, 3, 2);
  PgOptions options;
  options.gamma = 1e8;
  const SolveReport report = pg_solve(model, options);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(report.Y.norm() == 0.0);
  const CMatrix X_open = x_of_y(model, CMatrix::Zero(3, 5));
  const double f_open =
      real_part_checked((model.Q * X_open).trace(), X_open.norm());
  CHECK(report.f == doctest::Approx(f_open));
}

TEST_CASE("monotone descent and feasibility along iterates") {
  const PlantModel model = random_stable_model(9, 6, 3, 2);
  PgOptions options;
  options.gamma = 0.5;
  options.eps = 1e-6;
  double prev = std::numeric_limits<double>::infinity();
  const SolveReport report =
      pg_solve(model, options, std::nullopt, [&](const IterationRecord& rec) {
        CHECK(rec.objective <= prev + 1e-9 * (1.0 + std::abs(prev)));
        prev = rec.objective;
      });
  CHECK(report.status == SolveStatus::Converged);
  CHECK(is_positive_definite(report.X));
  // K X = Y reconstruction.
  CHECK((report.K * report.X - report.Y).norm() <=
        1e-8 * (1.0 + report.Y.norm()));
}

TEST_CASE("residuals reach stationarity certificates") {
  const PlantModel model = random_stable_model(13, 4, 4, 2);
  PgOptions options;
  options.gamma = 0.3;
  options.eps = 1e-6;
  const SolveReport report = pg_solve(model, options);
  CHECK(report.status == SolveStatus::Converged);
  const Weights w = Weights::ones(4);
  const double gap =
      stationarity_gap(report.grad, report.Y, options.gamma, w);
  CHECK(gap <= 10.0 * options.eps * (1.0 + report.grad.norm()));
}

TEST_CASE("infeasible start is rejected") {
  const PlantModel model = scalar_model();
  PgOptions options;
  // y = 1 gives x = 0.
  CHECK_THROWS_AS(
      pg_solve(model, options, CMatrix::Constant(1, 1, Complex(1.5))),
      InfeasibleYError);
}

TEST_CASE("backtracking recovers from an oversized initial step") {
  const PlantModel model = scalar_model();
  PgOptions options;
  options.gamma = 0.0;
  options.alpha_00 = 1e4;  // first prox candidate jumps far past y = 1
  options.eps = 1e-8;
  int max_bt = 0;
  const SolveReport report =
      pg_solve(model, options, CMatrix::Constant(1, 1, Complex(0.5)),
               [&](const IterationRecord& rec) {
                 max_bt = std::max(max_bt, rec.backtracks);
               });
  CHECK(report.status == SolveStatus::Converged);
  CHECK(max_bt > 0);
  CHECK(is_positive_definite(report.X));
}

TEST_CASE("fixed step 1/L_a never backtracks at gamma=0") {
  const PlantModel model = random_stable_model(17, 4, 2, 2);
  const AreSolution are = solve_are(model);
  const CMatrix Y0 = are.Kc * are.Xc;
  const double a = 2.0 * eval_f(model, Y0);
  const SublevelBounds bounds = sublevel_bounds(model, a);

  PgOptions options;
  options.gamma = 0.0;
  options.fixed_step = 1.0 / bounds.L_a;
  options.eps = 1e-6;
  const SolveReport report =
      pg_solve(model, options, Y0, [&](const IterationRecord& rec) {
        CHECK(rec.backtracks == 0);
      });
  CHECK(report.status == SolveStatus::Converged);
}

TEST_CASE("history rows are well formed") {
  const PlantModel model = random_stable_model(19, 4, 3, 2);
  PgOptions options;
  options.gamma = 1.0;
  const SolveReport report = pg_solve(model, options);
  REQUIRE(!report.history.empty());
  int expected = 1;
  for (const auto& rec : report.history) {
    CHECK(rec.iter == expected++);
    CHECK(rec.alpha > 0.0);
    CHECK(rec.r_r >= 0.0);
    CHECK(rec.r_n >= 0.0);
    CHECK(rec.nnz_rows >= 0);
    CHECK(rec.nnz_rows <= 3);
  }
  CHECK(report.history.back().r_r == doctest::Approx(report.r_r));
}
