#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sparsact/objective.hpp"
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

CMatrix random_complex(GaussianRng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      M(i, j) = Complex(rng(), rng()) / std::numbers::sqrt2;
    }
  }
  return M;
}

// A feasible Y near the centralized optimum, perturbed but kept inside
// the stabilizing set by bisection on the perturbation size.
CMatrix feasible_point(const PlantModel& model, GaussianRng& rng) {
  const AreSolution are = solve_are(model);
  const CMatrix Y_star = are.Kc * are.Xc;
  CMatrix D = random_complex(rng, model.m(), model.n());
  D *= (0.2 * (1.0 + Y_star.norm())) / D.norm();
  double t = 1.0;
  while (t > 1e-6) {
    const CMatrix Y = Y_star + t * D;
    if (is_positive_definite(x_of_y(model, Y))) return Y;
    t *= 0.5;
  }
  return Y_star;
}

}  // namespace

TEST_CASE("f on the scalar instance") {
  const PlantModel model = scalar_model();
  CHECK(eval_f(model, CMatrix::Zero(1, 1)) == doctest::Approx(1.0));
  CHECK(eval_f(model, CMatrix::Constant(1, 1, Complex(0.5))) ==
        doctest::Approx(1.0));
  const double root2 = std::numbers::sqrt2;
  const CMatrix Y_opt = CMatrix::Constant(1, 1, (root2 - 1.0) / root2);
  CHECK(eval_f(model, Y_opt) == doctest::Approx(2.0 * (root2 - 1.0)));
  CHECK_THROWS_AS(eval_f(model, CMatrix::Constant(1, 1, Complex(1.0))),
                  InfeasibleYError);
}

TEST_CASE("scalar gradient closed form") {
  const PlantModel model = scalar_model();
  const CMatrix g = grad_f(model, CMatrix::Constant(1, 1, Complex(0.5)));
  CHECK(std::abs(g(0, 0) - Complex(2.0)) < 1e-10);

  const double root2 = std::numbers::sqrt2;
  const CMatrix Y_opt = CMatrix::Constant(1, 1, (root2 - 1.0) / root2);
  CHECK(grad_f(model, Y_opt).norm() <= 1e-6);

  PlantModel free_model = scalar_model();
  free_model.Q = CMatrix::Zero(1, 1);
  CHECK(grad_f(free_model, CMatrix::Zero(1, 1)).norm() <= 1e-12);
}

TEST_CASE("gradient matches centered differences") {
  GaussianRng rng(41);
  int done = 0;
  for (std::uint64_t seed = 200; done < 50; ++seed) {
    const Eigen::Index n = 2 + seed % 7;
    const Eigen::Index m = 1 + seed % n;
    const PlantModel model =
        random_stable_model(seed, static_cast<int>(n), static_cast<int>(m),
                            static_cast<int>(1 + seed % n));
    const CMatrix Y = feasible_point(model, rng);
    const CMatrix D = random_complex(rng, m, n);
    const CMatrix grad = grad_f(model, Y);
    const double eps = 1e-5;
    const double fd =
        (eval_f(model, Y + eps * D) - eval_f(model, Y - eps * D)) / (2 * eps);
    const double directional = real_inner(grad, D);
    CHECK(std::abs(fd - directional) <=
          1e-5 * (1.0 + std::abs(fd) + grad.norm() * D.norm()));
    ++done;
  }
}

TEST_CASE("g and its prox") {
  CHECK(eval_g(CMatrix::Zero(3, 2), Weights::ones(3)) == 0.0);
  CMatrix Y(1, 2);
  Y << Complex(3.0), Complex(4.0);
  CHECK(eval_g(Y, Weights::ones(1)) == doctest::Approx(5.0));
  CHECK(eval_g(2.5 * Y, Weights::ones(1)) == doctest::Approx(12.5));

  const CMatrix P = prox_group_rows(Y, 2.5, Weights::ones(1));
  CHECK(std::abs(P(0, 0) - Complex(1.5)) < 1e-14);
  CHECK(std::abs(P(0, 1) - Complex(2.0)) < 1e-14);
  CHECK(prox_group_rows(Y, 5.0, Weights::ones(1)).norm() == 0.0);
  CHECK((prox_group_rows(Y, 0.0, Weights::ones(1)) - Y).norm() == 0.0);
}

TEST_CASE("prox optimality against random perturbations") {
  GaussianRng rng(42);
  const CMatrix V = random_complex(rng, 4, 3);
  Weights w{Eigen::VectorXd::Ones(4) * 0.7};
  const double beta = 0.4;
  const CMatrix P = prox_group_rows(V, beta, w);
  auto objective = [&](const CMatrix& Y) {
    return beta * eval_g(Y, w) + 0.5 * (Y - V).squaredNorm();
  };
  const double best = objective(P);
  for (int i = 0; i < 1000; ++i) {
    CMatrix pert = random_complex(rng, 4, 3);
    pert *= 1e-3 / pert.norm();
    CHECK(objective(P + pert) >= best - 1e-12);
  }
}

TEST_CASE("augmented Lagrangian value and gradient") {
  const CompletionInstance inst = synthetic_completion(7, 4, MaskKind::Diagonal);
  GaussianRng rng(43);
  const CMatrix Y = feasible_point(inst.model, rng);

  SUBCASE("penalty off reduces to f") {
    MultiplierState mult{CMatrix::Zero(4, 4), 0.0};
    CHECK(eval_F(inst.model, inst.data, Y, mult) ==
          doctest::Approx(eval_f(inst.model, Y)));
    CHECK((grad_F(inst.model, inst.data, Y, mult) - grad_f(inst.model, Y))
              .norm() <= 1e-10);
  }

  SUBCASE("zero violation leaves only f") {
    // The generator's Y_feasible satisfies A2(X(Y)) = G exactly.
    MultiplierState mult{random_complex(rng, 4, 4), 3.0};
    mult.Lambda = hermitianize(mult.Lambda);
    const double F = eval_F(inst.model, inst.data, inst.Y_feasible, mult);
    CHECK(F == doctest::Approx(eval_f(inst.model, inst.Y_feasible))
                   .epsilon(1e-8));
  }

  SUBCASE("finite differences") {
    MultiplierState mult{hermitianize(random_complex(rng, 4, 4)), 2.5};
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix D = random_complex(rng, 4, 4);
      const CMatrix grad = grad_F(inst.model, inst.data, Y, mult);
      const double eps = 1e-5;
      const double fd = (eval_F(inst.model, inst.data, Y + eps * D, mult) -
                         eval_F(inst.model, inst.data, Y - eps * D, mult)) /
                        (2 * eps);
      CHECK(std::abs(fd - real_inner(grad, D)) <=
            1e-5 * (1.0 + std::abs(fd) + grad.norm() * D.norm()));
    }
  }
}

TEST_CASE("Hessian quadratic form") {
  const PlantModel model = scalar_model();
  const CMatrix Y = CMatrix::Constant(1, 1, Complex(0.5));
  CHECK(hessian_quadratic_form(model, Y, CMatrix::Zero(1, 1)) == 0.0);
  // Scalar closed form: f''(y) = 2/(1-y)^3 = 16 at y = 0.5.
  CHECK(hessian_quadratic_form(model, Y, CMatrix::Identity(1, 1)) ==
        doctest::Approx(16.0));

  GaussianRng rng(44);
  const PlantModel rnd = random_stable_model(55, 3, 2, 2);
  const CMatrix Yr = feasible_point(rnd, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix D = random_complex(rng, 2, 3);
    const double h = hessian_quadratic_form(rnd, Yr, D);
    CHECK(h > 0.0);
    // 5-point stencil for the second directional derivative.
    const double eps = 1e-3;
    auto f = [&](double t) { return eval_f(rnd, Yr + t * D); };
    const double fd = (-f(2 * eps) + 16 * f(eps) - 30 * f(0) + 16 * f(-eps) -
                       f(-2 * eps)) /
                      (12 * eps * eps);
    CHECK(std::abs(fd - h) <= 1e-4 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("convexity along feasible segments") {
  GaussianRng rng(45);
  const PlantModel model = random_stable_model(66, 4, 2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix Y1 = feasible_point(model, rng);
    const CMatrix Y2 = feasible_point(model, rng);
    const CMatrix mid = 0.5 * (Y1 + Y2);
    if (!is_positive_definite(x_of_y(model, mid))) continue;
    CHECK(eval_f(model, mid) <=
          0.5 * eval_f(model, Y1) + 0.5 * eval_f(model, Y2) + 1e-10);
  }
}

TEST_CASE("sublevel bounds on the scalar instance") {
  const PlantModel model = scalar_model();
  const SublevelBounds bounds = sublevel_bounds(model, 1.0);
  // nu = (lambda_min(V)^2 / 4a) / (sigma_max(A)/sqrt(q) + sigma_max(B)/sqrt(r))^2
  CHECK(bounds.nu == doctest::Approx(0.25));
  CHECK(bounds.L_a >= bounds.mu_a);
  CHECK(bounds.mu_a > 0.0);

  // nu I <= X(Y) for feasible Y in the sublevel set.
  GaussianRng rng(46);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 100; ++trial) {
    const CMatrix Y = CMatrix::Constant(1, 1, Complex(rng() * 0.4));
    const CMatrix X = x_of_y(model, Y);
    if (!is_positive_definite(X)) continue;
    if (eval_f(model, Y) > 1.0) continue;
    CHECK(X(0, 0).real() >= bounds.nu - 1e-10);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("curvature sits between mu_a and L_a on the sublevel set") {
  const PlantModel model = random_stable_model(77, 3, 3, 2);
  const AreSolution are = solve_are(model);
  const CMatrix Y_star = are.Kc * are.Xc;
  const double f_star = eval_f(model, Y_star);
  const double a = 4.0 * (1.0 + f_star);
  const SublevelBounds bounds = sublevel_bounds(model, a);

  GaussianRng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    CMatrix D = random_complex(rng, 3, 3);
    D /= D.norm();
    CMatrix Y = Y_star + 0.05 * random_complex(rng, 3, 3);
    if (!is_positive_definite(x_of_y(model, Y))) continue;
    if (eval_f(model, Y) > a) continue;
    const double h = hessian_quadratic_form(model, Y, D);
    CHECK(h >= bounds.mu_a - 1e-8);
    CHECK(h <= bounds.L_a + 1e-8);
  }
}

TEST_CASE("sublevel bounds require positive definite Q") {
  PlantModel model = random_stable_model(88, 3, 2, 2);
  model.Q = CMatrix::Zero(3, 3);
  CHECK_THROWS_AS(sublevel_bounds(model, 1.0), BoundUnavailableError);
}

TEST_CASE("stationarity gap vanishes only at stationary rows") {
  GaussianRng rng(48);
  const Weights w = Weights::ones(2);
  // Nonzero row with grad = -gamma w y/||y||: gap 0.
  CMatrix Y(2, 2);
  Y << Complex(3.0), Complex(4.0), Complex(0.0), Complex(0.0);
  CMatrix grad = CMatrix::Zero(2, 2);
  grad(0, 0) = -0.6;
  grad(0, 1) = -0.8;  // -(1.0) * y / ||y||
  grad(1, 0) = 0.5;   // zero row, norm 0.5 <= gamma w = 1
  CHECK(stationarity_gap(grad, Y, 1.0, w) <= 1e-12);
  grad(1, 0) = 1.5;  // now exceeds the subdifferential ball
  CHECK(stationarity_gap(grad, Y, 1.0, w) == doctest::Approx(0.5));
}
