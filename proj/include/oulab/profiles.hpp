#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace oulab {

/// Cylinder test profile φ on R^k, evaluated on the leading k coordinates of
/// a possibly longer ξ; gradients and Hessians are zero-padded to the length
/// of the argument. Profiles:
///   cosine:     cos(aᵀξ + b)
///   gaussian:   exp(-|ξ - c|²/(2w²))
///   polybump:   Π pᵢ(ξᵢ) · exp(-|ξ|²/(2w²))
/// cosine and gaussian expose closed-form Gaussian moments
/// E[φ(m+Z)], E[∇φ(m+Z)], E[∇²φ(m+Z)] for Z ~ N(0,Σ).
class CylinderFunction {
 public:
  static CylinderFunction constant(double value = 1.0);
  static CylinderFunction cosine(Eigen::VectorXd a, double b);
  static CylinderFunction gaussian_bump(Eigen::VectorXd center, double width);
  /// coeffs[i] holds the coefficients (constant first) of the i-th 1-d factor.
  static CylinderFunction poly_bump(std::vector<Eigen::VectorXd> coeffs, double width);

  int arity() const { return arity_; }

  double value(const Eigen::VectorXd& xi) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& xi) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& xi) const;

  /// sup |φ| over R^k.
  double sup_norm() const;

  bool has_gaussian_moments() const;
  double moment_value(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) const;
  Eigen::VectorXd moment_gradient(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) const;
  Eigen::MatrixXd moment_hessian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) const;

  /// Parses {"cosine": {...}} / {"gaussian": {...}} / {"polybump": {...}} /
  /// {"constant": c}.
  static CylinderFunction from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

 private:
  struct Cosine {
    Eigen::VectorXd a;
    double b;
    double scale;  // scale·cos(aᵀξ+b); scale ≠ 1 only for constant profiles
  };
  struct Bump {
    Eigen::VectorXd center;
    double width;
  };
  struct PolyBump {
    std::vector<Eigen::VectorXd> coeffs;
    double width;
  };

  int arity_ = 0;
  std::variant<Cosine, Bump, PolyBump> impl_;
};

}  // namespace oulab
