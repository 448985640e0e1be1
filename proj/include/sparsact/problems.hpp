#pragma once

#include <cstdint>
#include <random>

#include "sparsact/linalg.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

struct ShParams {
  int n = 32;  // grid points on [0, 2pi), periodic
  double c = -0.2;
  double alpha = 2.0;
  double omega = 1.25;

  void validate() const;
};

enum class MaskKind { Diagonal, Full, RandomSym };

struct CompletionInstance {
  PlantModel model;
  CompletionData data;
  // Generating covariance blocks, kept for validation only.
  CMatrix Sigma11;
  CMatrix Sigma12;
  CMatrix Y_feasible;  // Y with A1(Sigma11) = B(Y) - V and A2(Sigma11) = G
};

/// Deterministic cross-platform Gaussian source. std::normal_distribution
/// is not pinned by the standard, so Box-Muller is done by hand.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  double operator()();
  RMatrix real_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fourier spectral second-derivative matrix on the uniform periodic
/// grid xi_j = 2 pi j / n. Requires even n.
RMatrix fourier_second_derivative(int n);

/// Modulated Swift-Hohenberg linearization:
/// A = -(D2 + I)^2 - c I + diag(alpha cos(omega xi_j)),
/// B = C = V = Q = I, R = 10 I.
PlantModel swift_hohenberg(const ShParams& params);

/// Random Hurwitz model: A = M - (spectral_abscissa(M) + 0.5) I with
/// Gaussian M, unit-column B and C, V = Q = I, R = I.
PlantModel random_stable_model(std::uint64_t seed, int n, int m, int p);

/// Filter-driven completion instance: the 2n x 2n augmented Lyapunov
/// equation with drift [[A, I], [0, -I]] and input [0; I] yields Sigma,
/// and G = (C Sigma11 C*) o E. The delivered model has B = I, V = I,
/// R = I, Q = 0, C = I, so the instance is feasible by construction.
CompletionInstance synthetic_completion(std::uint64_t seed, int n,
                                        MaskKind mask_kind,
                                        double density = 0.3);

}  // namespace sparsact
