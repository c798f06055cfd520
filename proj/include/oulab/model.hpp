#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace oulab {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-by-two leading block plus identity tail, the diffusion shape used by
/// the Dirichlet-Laplacian preset.
struct Block2Diffusion {
  double q1, q2, q3;
};

/// Truncated operator pair (A, Q) on R^N.
///
/// Invariants established at construction: Q symmetric (symmetrized on load)
/// and PSD up to -1e-12·‖Q‖; A passes the contraction check (log-norm ≤ 1e-12)
/// or, failing that, is Hurwitz and flagged with contraction_warning.
struct SpectralModel {
  int dim = 0;
  Eigen::MatrixXd drift;      // A
  Eigen::MatrixXd diffusion;  // Q, symmetric
  std::string label;

  // Shorthands remembered from the config so re-serialization is canonical.
  std::optional<Eigen::VectorXd> drift_diag;
  std::optional<Block2Diffusion> diffusion_block2;

  bool contraction_warning = false;
};

struct DegeneracyFlag {
  bool nondegenerate = false;
  int rank = 0;
};

/// Validates (symmetry, PSD, contraction) and returns the finished model.
SpectralModel make_model(int dim, Eigen::MatrixXd drift, Eigen::MatrixXd diffusion,
                         std::string label = {});

SpectralModel model_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const SpectralModel& model);

SpectralModel load_model(const std::filesystem::path& path);
void save_model(const SpectralModel& model, const std::filesystem::path& path);

/// Rank of Q at tolerance tol (eigenvalues > tol·max(1, λ_max) count).
DegeneracyFlag degeneracy(const SpectralModel& model, double tol = 1e-12);

}  // namespace oulab
