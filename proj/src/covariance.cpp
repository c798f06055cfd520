#include "oulab/covariance.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "oulab/linalg.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

Eigen::MatrixXd covariance_finite(const SpectralModel& model, double t, int panels) {
  if (!(t > 0.0)) throw std::invalid_argument("covariance_finite: t must be positive");
  if (panels < 1) throw std::invalid_argument("covariance_finite: panels must be >= 1");
  const GaussRule base = gauss_legendre(16);
  const int n = model.dim;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  const double h = t / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    for (int i = 0; i < 16; ++i) {
      const double s = lo + 0.5 * h * (base.nodes(i) + 1.0);
      const double w = 0.5 * h * base.weights(i);
      const Eigen::MatrixXd e = (s * model.drift).exp();
      acc.noalias() += w * (e * model.diffusion * e.transpose());
    }
  }
  return symmetrize(acc);
}

CovariancePack covariance_infinity(const SpectralModel& model) {
  const double alpha = spectral_abscissa(model.drift);
  if (alpha >= -1e-12) {
    throw std::runtime_error("drift not Hurwitz: spectral abscissa " + std::to_string(alpha));
  }
  CovariancePack pack;
  pack.method = CovariancePack::Method::sylvester;
  pack.q_inf = sylvester_lyapunov(model.drift, model.diffusion);
  pack.lyap_residual = lyapunov_residual(model, pack.q_inf);
  return pack;
}

double lyapunov_residual(const SpectralModel& model, const Eigen::MatrixXd& q_inf) {
  if (q_inf.rows() != model.dim || q_inf.cols() != model.dim) {
    throw std::invalid_argument("lyapunov_residual: shape mismatch");
  }
  return (q_inf * model.drift.transpose() + model.drift * q_inf + model.diffusion).norm();
}

}  // namespace oulab
