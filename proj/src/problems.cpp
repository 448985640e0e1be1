#include "sparsact/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sparsact {

void ShParams::validate() const {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("Swift-Hohenberg grid needs even n >= 8");
  }
}

double GaussianRng::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on uniforms drawn from the raw engine. u1 is kept away
  // from zero so the log stays finite.
  const double scale = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 2.0);
  const double u1 = (static_cast<double>(engine_()) + 1.0) * scale;
  const double u2 = (static_cast<double>(engine_()) + 1.0) * scale;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

RMatrix GaussianRng::real_matrix(Eigen::Index rows, Eigen::Index cols) {
  RMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = (*this)();
  }
  return out;
}

RMatrix fourier_second_derivative(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("even n required for the Fourier grid");
  }
  // D2 = F^{-1} diag(-k^2) F, assembled densely. For index j the
  // wavenumber is j for j <= n/2 and j - n beyond, so the Nyquist mode
  // picks up -(n/2)^2, which is the symmetric choice for even
  // derivatives.
  const double two_pi = 2.0 * std::numbers::pi;
  CMatrix F(n, n);
  Eigen::VectorXd k2(n);
  for (int j = 0; j < n; ++j) {
    const int k = (j <= n / 2) ? j : j - n;
    k2(j) = static_cast<double>(k) * static_cast<double>(k);
    for (int l = 0; l < n; ++l) {
      const double phase = -two_pi * static_cast<double>(j) * l / n;
      F(j, l) = Complex(std::cos(phase), std::sin(phase));
    }
  }
  const CMatrix D2c =
      (F.adjoint() * (-k2.asDiagonal().toDenseMatrix().cast<Complex>()) * F) /
      static_cast<double>(n);
  return D2c.real();
}

PlantModel swift_hohenberg(const ShParams& params) {
  params.validate();
  const int n = params.n;
  const RMatrix D2 = fourier_second_derivative(n);
  const RMatrix I = RMatrix::Identity(n, n);
  RMatrix A = -(D2 + I) * (D2 + I) - params.c * I;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int j = 0; j < n; ++j) {
    const double xi = two_pi * j / n;
    A(j, j) += params.alpha * std::cos(params.omega * xi);
  }

  PlantModel model;
  model.A = A.cast<Complex>();
  model.B = CMatrix::Identity(n, n);
  model.C = CMatrix::Identity(n, n);
  model.V = CMatrix::Identity(n, n);
  model.Q = CMatrix::Identity(n, n);
  model.R = 10.0 * CMatrix::Identity(n, n);
  model.validate();
  return model;
}

PlantModel random_stable_model(std::uint64_t seed, int n, int m, int p) {
  if (n < m || n < p || m < 1 || p < 1) {
    throw std::invalid_argument("need n >= m >= 1 and n >= p >= 1");
  }
  GaussianRng rng(seed);
  const RMatrix M = rng.real_matrix(n, n);
  RMatrix B = rng.real_matrix(n, m);
  RMatrix C = rng.real_matrix(p, n);
  for (Eigen::Index j = 0; j < B.cols(); ++j) B.col(j).normalize();
  for (Eigen::Index j = 0; j < C.cols(); ++j) C.col(j).normalize();

  PlantModel model;
  const double shift = spectral_abscissa(M.cast<Complex>()) + 0.5;
  model.A = (M - shift * RMatrix::Identity(n, n)).cast<Complex>();
  model.B = B.cast<Complex>();
  model.C = C.cast<Complex>();
  model.V = CMatrix::Identity(n, n);
  model.Q = CMatrix::Identity(n, n);
  model.R = CMatrix::Identity(m, m);
  model.validate();
  return model;
}

CompletionInstance synthetic_completion(std::uint64_t seed, int n,
                                        MaskKind mask_kind, double density) {
  PlantModel base = random_stable_model(seed, n, n, n);
  PlantModel model;
  model.A = base.A;
  model.B = CMatrix::Identity(n, n);
  model.C = CMatrix::Identity(n, n);
  model.V = CMatrix::Identity(n, n);
  model.Q = CMatrix::Zero(n, n);
  model.R = CMatrix::Identity(n, n);
  model.validate();

  // Filter augmentation: the white input enters through a first-order
  // filter xi' = -xi + w, and the plant sees xi.
  CMatrix A_aug = CMatrix::Zero(2 * n, 2 * n);
  A_aug.topLeftCorner(n, n) = model.A;
  A_aug.topRightCorner(n, n) = CMatrix::Identity(n, n);
  A_aug.bottomRightCorner(n, n) = -CMatrix::Identity(n, n);
  CMatrix W = CMatrix::Zero(2 * n, 2 * n);
  W.bottomRightCorner(n, n) = CMatrix::Identity(n, n);

  const CMatrix Sigma = hermitianize(solve_lyapunov(A_aug, W));
  CompletionInstance inst;
  inst.model = model;
  inst.Sigma11 = hermitianize(Sigma.topLeftCorner(n, n));
  inst.Sigma12 = Sigma.topRightCorner(n, n);
  inst.Y_feasible = 0.5 * model.V - inst.Sigma12.adjoint();

  RMatrix E;
  switch (mask_kind) {
    case MaskKind::Diagonal:
      E = RMatrix::Identity(n, n);
      break;
    case MaskKind::Full:
      E = RMatrix::Ones(n, n);
      break;
    case MaskKind::RandomSym: {
      if (density <= 0.0 || density > 1.0) {
        throw std::invalid_argument("mask density must lie in (0, 1]");
      }
      GaussianRng mask_rng(seed ^ 0x9e3779b97f4a7c15ull);
      E = RMatrix::Identity(n, n);
      // Gaussian draws double as uniform coins through the normal CDF.
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double z = mask_rng();
          const double u = 0.5 * std::erfc(-z / std::numbers::sqrt2);
          if (u < density) {
            E(i, j) = 1.0;
            E(j, i) = 1.0;
          }
        }
      }
      break;
    }
  }
  inst.data.E = E;
  inst.data.G = apply_A2(model.C, inst.data.E, inst.Sigma11);
  inst.data.validate(n);
  return inst;
}

}  // namespace sparsact
