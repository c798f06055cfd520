#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oulab {

struct GramStep {
  int seed_index;
  double residual_norm;  // H∞ norm of the seed after removing earlier directions
  bool kept;
};

/// Frame F of functionals f*_1..f*_n whose Q∞-images e_j = Q∞f*_j are
/// orthonormal in H∞, i.e. FᵀQ∞F = Iₙ.
struct ThetaBasis {
  Eigen::MatrixXd frame;   // N×n, column j holds f*_j
  Eigen::MatrixXd images;  // N×n, Q∞·frame
  std::vector<GramStep> gram_log;

  int dim() const { return static_cast<int>(frame.rows()); }
  int width() const { return static_cast<int>(frame.cols()); }

  /// Wraps an arbitrary frame without orthonormalizing (raw frames are
  /// allowed for hypothesis checks).
  static ThetaBasis from_frame(Eigen::MatrixXd frame, const Eigen::MatrixXd& q_inf);
};

/// Canonical coordinate seeds e_1..e_N.
std::vector<Eigen::VectorXd> canonical_seeds(int dim);

/// Modified Gram-Schmidt in the ⟨Q∞·,·⟩ inner product. Seeds whose residual
/// H∞ norm falls below 1e-12 relative to the seed norm are skipped (the
/// cofinal index rule). Throws when fewer than n independent directions remain.
ThetaBasis gram_schmidt_theta(const Eigen::MatrixXd& q_inf,
                              const std::vector<Eigen::VectorXd>& seeds, int n);

/// Θ-coordinates of Pₙx: (⟨x,f*_1⟩, …, ⟨x,f*_n⟩).
Eigen::VectorXd project_theta(const ThetaBasis& basis, const Eigen::VectorXd& x);

/// FᵀQ∞F, the covariance of the pushforward of μ∞ under the Θ-coordinates;
/// equals Iₙ for a frame produced by gram_schmidt_theta.
Eigen::MatrixXd pushforward_covariance(const ThetaBasis& basis, const Eigen::MatrixXd& q_inf);

}  // namespace oulab
