#pragma once

#include <Eigen/Dense>

#include "oulab/model.hpp"

namespace oulab {

/// Dirichlet-Laplacian preset: A eₙ = -(πn)² eₙ, diffusion with leading block
/// [[q1,q2],[q2,q3]] and identity tail.
///
/// Closed forms carried along: Q∞ top block [[q1/(2π²), q2/(5π²)],
/// [q2/(5π²), q3/(8π²)]] with tail 1/(2i²π²), and B = Q∞Aᵀ top block
/// [[-q1/2, -4q2/5], [-q2/5, -q3/2]] with tail -1/2. The tails are the
/// Lyapunov-consistent values; `printed_tail` switches to the 1/(i²π²) and -1
/// variants some sources print (kept for comparison, never used by the
/// verification suite).
struct ExamplePreset {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
  int dim = 0;
  bool printed_tail = false;

  SpectralModel model;
  Eigen::MatrixXd q_inf_closed;
  Eigen::MatrixXd b_closed;  // Q∞Aᵀ as an N×N matrix

  bool admissible = false;
  double admissibility_lhs = 0.0;
  double nu = 0.0;  // closed-form bound, valid when admissible
};

struct AdmissibilityResult {
  bool admissible = false;
  double lhs = 0.0;              // (9/25)·q2²(q1q3+q2²)/(q1q3-q2²)², must be < 1
  bool sufficient_cond = false;  // 3q2² ≤ q1q3
};

ExamplePreset build_example(double q1, double q2, double q3, int dim, bool printed_tail = false);

AdmissibilityResult admissibility(double q1, double q2, double q3);

/// ν = (9/25)(q1q3q2⁻² + 1)/(q1q3q2⁻² - 1)².
double nu_formula(double q1, double q2, double q3);

}  // namespace oulab
