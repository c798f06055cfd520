#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oulab/covariance.hpp"
#include "oulab/galerkin.hpp"
#include "oulab/mehler.hpp"
#include "oulab/model.hpp"
#include "oulab/profiles.hpp"
#include "oulab/quadrature.hpp"
#include "oulab/sobolev.hpp"

namespace oulab {

/// One verified bound or identity. For inequalities margin = rhs - lhs; a
/// criterion passes when the margin clears twice the batch-means error bar,
/// fails when it undershoots by the same amount, and is inconclusive in
/// between. Identities use |residual| ≤ 2·bar as the pass rule.
struct CriterionResult {
  std::string id;
  std::string kind;  // "inequality" | "identity"
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double error_bar = 0.0;
  std::string status;  // "pass" | "fail" | "inconclusive"
};

struct CellReport {
  int n = 0;
  double epsilon = 0.0;
  double nu = 0.0;
  bool nu_pencil_ok = true;
  double dissipation_residual = 0.0;
  double norm_phi = 0.0;
  NormSet norms;
  double energy_residual = 0.0;
  std::vector<double> weak_residuals;
  double bound_k = 0.0;
  std::vector<CriterionResult> criteria;
  std::string status;
};

struct VerificationReport {
  std::string schema = "ou-report/1";
  std::string model_label;
  int model_dim = 0;
  double lambda = 0.0;
  std::vector<int> ladder;
  std::vector<double> eps_grid;
  nlohmann::ordered_json phi;
  QuadratureSpec quad;
  std::vector<CellReport> cells;
  std::vector<CriterionResult> ladder_criteria;  // K-stability per epsilon level
  std::string overall;
};

struct ConvergenceRow {
  int n_lo = 0;
  int n_hi = 0;
  double w12_diff = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

/// Solves λV - ℒₙV = φ on every (n, ε) cell and evaluates the a-priori
/// bounds, the energy identity, the weak formulation against a fixed battery
/// of five cosine tests, the maximal-regularity bound with ν from the trace
/// pencil, and the total bound constant K.
VerificationReport solve_and_verify(const SpectralModel& model, double lambda,
                                    const CylinderFunction& phi, const std::vector<int>& ladder,
                                    const std::vector<double>& eps_grid,
                                    const QuadratureSpec& quad);

/// ‖V_{n_{k+1}} - V_{n_k}‖_{W^{1,2}_H} by joint sampling on the larger frame.
ConvergenceTable convergence_study(const SpectralModel& model, double lambda,
                                   const CylinderFunction& phi, const std::vector<int>& ladder,
                                   const QuadratureSpec& quad);

/// Max scaled residual of 4Tr[HCHC] = Tr[MCMC] + Tr[(H-Hᵀ)C(H-Hᵀ)C] over
/// random (H, M, C) with H + Hᵀ = -M and M, C symmetric.
double matrix_identity_check(int trials, int dim, std::uint64_t seed);

nlohmann::ordered_json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);

std::string convergence_csv(const ConvergenceTable& table);

/// 0 = all pass, 2 = any fail, 3 = any inconclusive.
int report_exit_code(const VerificationReport& report);

/// Fixed battery of cosine test functions used by the weak-form criterion.
std::vector<CylinderFunction> weak_test_battery(int n);

}  // namespace oulab
