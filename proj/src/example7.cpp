#include "oulab/example7.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oulab {

namespace {
constexpr double kPi = std::numbers::pi;
}

AdmissibilityResult admissibility(double q1, double q2, double q3) {
  if (!(q1 > 0.0 && q2 > 0.0 && q3 > 0.0)) {
    throw std::invalid_argument("admissibility: q1, q2, q3 must be positive");
  }
  AdmissibilityResult res;
  const double det = q1 * q3 - q2 * q2;
  if (det <= 0.0) {
    res.admissible = false;
    res.lhs = std::numeric_limits<double>::infinity();
    res.sufficient_cond = false;
    return res;
  }
  res.lhs = (9.0 / 25.0) * q2 * q2 * (q1 * q3 + q2 * q2) / (det * det);
  res.admissible = res.lhs < 1.0;
  res.sufficient_cond = 3.0 * q2 * q2 <= q1 * q3;
  return res;
}

double nu_formula(double q1, double q2, double q3) {
  const double r = q1 * q3 / (q2 * q2);
  if (r <= 1.0) throw std::invalid_argument("nu_formula: requires q1q3 > q2^2");
  return (9.0 / 25.0) * (r + 1.0) / ((r - 1.0) * (r - 1.0));
}

ExamplePreset build_example(double q1, double q2, double q3, int dim, bool printed_tail) {
  if (dim < 2) throw std::invalid_argument("build_example: dim must be >= 2");
  if (!(q1 > 0.0 && q2 > 0.0 && q3 > 0.0)) {
    throw std::invalid_argument("build_example: q1, q2, q3 must be positive");
  }
  if (q1 * q3 - q2 * q2 <= 0.0) {
    throw std::invalid_argument("build_example: q1q3 - q2^2 must be positive");
  }

  ExamplePreset preset;
  preset.q1 = q1;
  preset.q2 = q2;
  preset.q3 = q3;
  preset.dim = dim;
  preset.printed_tail = printed_tail;

  Eigen::VectorXd eig(dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i + 1.0;
    eig(i) = -(kPi * n) * (kPi * n);
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim, dim);
  q(0, 0) = q1;
  q(0, 1) = q2;
  q(1, 0) = q2;
  q(1, 1) = q3;

  preset.model = make_model(dim, Eigen::MatrixXd(eig.asDiagonal()), q, "example7");
  preset.model.drift_diag = eig;
  preset.model.diffusion_block2 = Block2Diffusion{q1, q2, q3};

  const double pi2 = kPi * kPi;
  preset.q_inf_closed = Eigen::MatrixXd::Zero(dim, dim);
  preset.q_inf_closed(0, 0) = q1 / (2.0 * pi2);
  preset.q_inf_closed(0, 1) = q2 / (5.0 * pi2);
  preset.q_inf_closed(1, 0) = q2 / (5.0 * pi2);
  preset.q_inf_closed(1, 1) = q3 / (8.0 * pi2);
  preset.b_closed = Eigen::MatrixXd::Zero(dim, dim);
  preset.b_closed(0, 0) = -q1 / 2.0;
  preset.b_closed(0, 1) = -4.0 * q2 / 5.0;
  preset.b_closed(1, 0) = -q2 / 5.0;
  preset.b_closed(1, 1) = -q3 / 2.0;
  for (int i = 2; i < dim; ++i) {
    const double n2 = (i + 1.0) * (i + 1.0);
    if (printed_tail) {
      preset.q_inf_closed(i, i) = 1.0 / (n2 * pi2);
      preset.b_closed(i, i) = -1.0;
    } else {
      preset.q_inf_closed(i, i) = 1.0 / (2.0 * n2 * pi2);
      preset.b_closed(i, i) = -0.5;
    }
  }

  const AdmissibilityResult adm = admissibility(q1, q2, q3);
  preset.admissible = adm.admissible;
  preset.admissibility_lhs = adm.lhs;
  preset.nu = adm.admissible ? nu_formula(q1, q2, q3) : 1.0;
  return preset;
}

}  // namespace oulab
