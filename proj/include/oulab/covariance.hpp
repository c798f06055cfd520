#pragma once

#include <Eigen/Dense>

#include "oulab/model.hpp"

namespace oulab {

struct CovariancePack {
  enum class Method { sylvester, quadrature };

  Eigen::MatrixXd q_inf;
  double lyap_residual = 0.0;
  Method method = Method::sylvester;
};

/// Q_t = ∫₀ᵗ e^{sA} Q e^{sAᵀ} ds by composite 16-point Gauss-Legendre over
/// `panels` equal panels; the result is symmetrized.
Eigen::MatrixXd covariance_finite(const SpectralModel& model, double t, int panels);

/// Solves A Q∞ + Q∞ Aᵀ = -Q (Schur-based) and records the residual. Throws
/// when the drift is not Hurwitz.
CovariancePack covariance_infinity(const SpectralModel& model);

/// ‖Q∞Aᵀ + AQ∞ + Q‖_F.
double lyapunov_residual(const SpectralModel& model, const Eigen::MatrixXd& q_inf);

}  // namespace oulab
