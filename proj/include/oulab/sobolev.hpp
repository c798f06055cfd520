#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oulab/galerkin.hpp"
#include "oulab/mehler.hpp"
#include "oulab/profiles.hpp"

namespace oulab {

/// Sample mean with a batch-means error bar (std error of the mean over
/// `batches` consecutive batches).
struct MeanStat {
  double mean = 0.0;
  double error_bar = 0.0;
};

MeanStat batch_mean(const Eigen::VectorXd& values, int batches = 16);

/// Pointwise Gaussian-Sobolev densities in Θ-coordinates. The ξ-expectations
/// of these are the Gaussian Sobolev norms (all over ξ ~ N(0, Iₙ), justified
/// by pushforward_covariance = I).
class SobolevCalc {
 public:
  explicit SobolevCalc(const GalerkinPair& pair);

  const GalerkinPair& pair() const { return pair_; }

  double l2_sq(const SolvedPoint& p) const { return p.value * p.value; }
  /// ∇vᵀ q ∇v = |D_H u|²_H.
  double dh_sq(const SolvedPoint& p) const;
  /// Tr[q C q C] = ‖D²_H u‖²_HS, evaluated by whitening as ‖LᵀCL‖²_F.
  double dh2_hs_sq(const SolvedPoint& p) const;
  /// |b ∇v|² = |PₙD_{A∞}u|²_{H∞}.
  double dainf_sq(const SolvedPoint& p) const;
  /// -∇wᵀ b ∇u, the integrand of ℰ(u,w).
  double energy_density(const SolvedPoint& u, const SolvedPoint& w) const;

 private:
  GalerkinPair pair_;
  Eigen::MatrixXd chol_q_;  // q = L Lᵀ (PSD factor)
};

struct NormSet {
  double l2 = 0.0, dh = 0.0, dh2_hs = 0.0, pn_dainf = 0.0;
};

/// Square roots of the sample means of the four densities.
NormSet norms(const std::vector<SolvedPoint>& samples, const GalerkinPair& pair);

/// ℰ(u,w) = -E[∇wᵀ b ∇u] over matched sample sets.
double energy_form(const std::vector<SolvedPoint>& u, const std::vector<SolvedPoint>& w,
                   const GalerkinPair& pair);

/// One field component φ·h with h the B-image of the `direction`-th frame
/// functional (an admissible divergence direction).
struct HFieldComponent {
  CylinderFunction profile;
  int direction;
};

/// div_H Ψ(ξ) = -Σᵢ(∇φᵢᵀ b(:,jᵢ) - φᵢ · b(:,jᵢ)ᵀξ).
double divergence_h(const std::vector<HFieldComponent>& field, const GalerkinPair& pair,
                    const Eigen::VectorXd& xi);

/// Same with directions given as coefficient vectors c over the admissible
/// family (h = Σ c_j · B-image of f*_j).
double divergence_h_combo(const std::vector<std::pair<CylinderFunction, Eigen::VectorXd>>& field,
                          const GalerkinPair& pair, const Eigen::VectorXd& xi);

/// H-Gram of the admissible direction family: bᵀ q⁻¹ b.
Eigen::MatrixXd direction_gram_h(const GalerkinPair& pair);

/// H∞-Gram of the V*-images of the directions: bᵀ b.
Eigen::MatrixXd direction_gram_vstar(const GalerkinPair& pair);

/// Both sides of the ‖𝐃_H B D_H v‖ vs ½‖D²_H v‖ comparison at one Hessian
/// (an experiment, not an invariant: the equality needs the skew part of the
/// whitened drift to annihilate the whitened Hessian).
struct TwoSided {
  double lhs = 0.0, rhs = 0.0;
};

TwoSided hessian_chain_experiment(const GalerkinPair& pair, const Eigen::MatrixXd& hessian);

}  // namespace oulab
