#pragma once

#include <optional>

#include <Eigen/Dense>

#include "oulab/basis.hpp"
#include "oulab/model.hpp"

namespace oulab {

/// Gram matrices of the diffusion and drift pairings in a Θ-frame:
///   q_mat[k][j] = ⟨Q f*_j, f*_k⟩ + ε δ_{kj}
///   b_mat[k][j] = ⟨Q∞Aᵀ f*_j, f*_k⟩ - (ε/2) δ_{kj}
/// The ε adjustments regularize a degenerate diffusion while preserving the
/// dissipation identity b + bᵀ = -q exactly for every ε ≥ 0.
struct GalerkinPair {
  int n = 0;
  Eigen::MatrixXd q_mat;
  Eigen::MatrixXd b_mat;
  double epsilon = 0.0;
};

struct HypothesisReport {
  double c_rkhs = 0.0;
  double nu_min = 0.0;
  bool nu_ok = false;  // nu_min < 1
  std::optional<double> nu_bound;
  // eigen-diagnostics of the pair behind the constants
  double q_min_eig = 0.0;
  double sym_b_max_eig = 0.0;
  double skew_norm = 0.0;
};

GalerkinPair build_pair(const SpectralModel& model, const Eigen::MatrixXd& q_inf,
                        const ThetaBasis& basis, int n, double epsilon);

/// ‖b + bᵀ + q‖_F.
double check_dissipation(const GalerkinPair& pair);

/// Smallest ν with Tr[(b-bᵀ)C(b-bᵀ)C] ≥ -ν Tr[qCqC] for all symmetric C,
/// clamped below at 0; computed as the top generalized eigenvalue of the
/// pencil (-K, G) on svec space. Requires q positive definite.
double nu_min(const GalerkinPair& pair);

/// Smallest c with |i*∞Aᵀx*|_H ≤ c |i*x*|_H over the truncation. For
/// degenerate Q the computation restricts to range(Q) after checking that
/// Q∞Aᵀ maps into it; otherwise throws "image escapes H".
double rkhs_constant(const SpectralModel& model, const Eigen::MatrixXd& q_inf);

/// Bundles the hypothesis constants for one pair; nu_bound, when given, is an
/// externally supplied upper bound (e.g. the preset formula).
HypothesisReport hypothesis_report(const SpectralModel& model, const Eigen::MatrixXd& q_inf,
                                   const GalerkinPair& pair,
                                   std::optional<double> nu_bound = std::nullopt);

}  // namespace oulab
