#pragma once

#include <vector>

#include <Eigen/Dense>

#include "oulab/galerkin.hpp"
#include "oulab/profiles.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

/// Solution data of λv - ℒv = φ at one sample point.
struct SolvedPoint {
  Eigen::VectorXd xi;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Laplace-transform rule: ∫₀^∞ e^{-λt} g(t) dt ≈ Σ wᵢ g(tᵢ), built by the
/// substitution u = e^{-t} and composite Gauss-Legendre on decade panels of
/// [u*, 1] with u*^λ = 1e-12 (the truncation tolerance).
struct LaplaceRule {
  Eigen::VectorXd t;
  Eigen::VectorXd w;
};

LaplaceRule make_laplace_rule(double lambda, int nodes);

/// Gaussian semigroup representation of the operator
///   ℒψ = ½Tr[q ∇²ψ] + ⟨ξ, b ∇ψ⟩
/// attached to a GalerkinPair: T(t)φ(ξ) = E[φ(e^{tM}ξ + Z_t)] with M = bᵀ
/// and Z_t ~ N(0, Σ_t), Σ_t = ∫₀ᵗ e^{sM} q e^{sMᵀ} ds.
class MehlerKernel {
 public:
  explicit MehlerKernel(GalerkinPair pair);

  int n() const { return pair_.n; }
  const GalerkinPair& pair() const { return pair_; }
  const Eigen::MatrixXd& drift_matrix() const { return m_; }
  const Eigen::MatrixXd& sigma_infinity() const { return sigma_inf_; }
  const std::vector<double>& sigma_grid() const { return sigma_grid_; }

  Eigen::MatrixXd propagator(double t) const;  // e^{tM}
  Eigen::MatrixXd sigma(double t) const;       // Σ_t, exact up to the matrix exponential

  /// Precomputed per-(λ, quadrature) evaluation data, reusable across sample
  /// points.
  struct Plan {
    double lambda = 0.0;
    LaplaceRule rule;
    std::vector<Eigen::MatrixXd> prop;        // e^{tᵢM}
    std::vector<Eigen::MatrixXd> sig;         // Σ_{tᵢ}
    std::vector<Eigen::MatrixXd> sqrt_sig;    // PSD square roots
    Eigen::MatrixXd zpts;                     // expectation quadrature points (rows)
    Eigen::VectorXd zw;                       // matching weights
    bool force_quadrature = false;
  };

  Plan plan(double lambda, const QuadratureSpec& quad) const;

  double semigroup_apply(double t, const CylinderFunction& phi, const Eigen::VectorXd& xi,
                         const QuadratureSpec& quad) const;
  Eigen::VectorXd semigroup_gradient(double t, const CylinderFunction& phi,
                                     const Eigen::VectorXd& xi, const QuadratureSpec& quad) const;
  Eigen::MatrixXd semigroup_hessian(double t, const CylinderFunction& phi,
                                    const Eigen::VectorXd& xi, const QuadratureSpec& quad) const;

  /// R(λ)φ(ξ) with optional derivatives, one pass over the Laplace nodes.
  SolvedPoint resolvent_solve(const Plan& plan, const CylinderFunction& phi,
                              const Eigen::VectorXd& xi, bool want_gradient,
                              bool want_hessian) const;

  double resolvent_apply(double lambda, const CylinderFunction& phi, const Eigen::VectorXd& xi,
                         const QuadratureSpec& quad) const;
  Eigen::VectorXd resolvent_gradient(double lambda, const CylinderFunction& phi,
                                     const Eigen::VectorXd& xi, const QuadratureSpec& quad) const;
  Eigen::MatrixXd resolvent_hessian(double lambda, const CylinderFunction& phi,
                                    const Eigen::VectorXd& xi, const QuadratureSpec& quad) const;

 private:
  struct Expectation {
    double value;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
  };

  Expectation gaussian_expectation(const CylinderFunction& phi, const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& sig, const Eigen::MatrixXd& sqrt_sig,
                                   const Eigen::MatrixXd& zpts, const Eigen::VectorXd& zw,
                                   bool force_quadrature, bool want_gradient,
                                   bool want_hessian) const;

  void make_zrule(const QuadratureSpec& quad, Eigen::MatrixXd& zpts, Eigen::VectorXd& zw) const;

  GalerkinPair pair_;
  Eigen::MatrixXd m_;          // bᵀ
  Eigen::MatrixXd sigma_inf_;  // solves M Σ + Σ Mᵀ = -q
  std::vector<double> sigma_grid_;
};

/// max over the supplied points of |λv - ½Tr[q∇²v] - ⟨ξ, b∇v⟩ - φ(ξ)|.
double pde_residual(const GalerkinPair& pair, double lambda, const CylinderFunction& phi,
                    const std::vector<SolvedPoint>& points);

}  // namespace oulab
