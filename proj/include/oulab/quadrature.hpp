#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace oulab {

struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int order, double a, double b);

/// Probabilists' Gauss-Hermite rule: E[f(Z)] ≈ Σ wᵢ f(xᵢ) for Z ~ N(0,1),
/// with Σ wᵢ = 1.
GaussRule gauss_hermite(int order);

/// Inverse CDF of the standard normal distribution, p ∈ (0, 1).
double normal_icdf(double p);

/// Deterministic standard-normal sampler (mt19937_64 + inverse CDF); the
/// stream is identical across platforms for a given seed.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next();
  Eigen::VectorXd vector(int n);
  /// rows × cols matrix filled row by row.
  Eigen::MatrixXd matrix(int rows, int cols);

 private:
  std::mt19937_64 rng_;
};

/// Digitally shifted Sobol sequence (direction numbers for up to 21
/// dimensions), mapped through the normal inverse CDF on demand.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 21;

  SobolSequence(int dim, std::uint64_t seed);

  int dim() const { return dim_; }

  /// Next point in (0,1)^dim.
  Eigen::VectorXd next_uniform();

  /// count × dim matrix of standard-normal QMC points.
  Eigen::MatrixXd normal_points(int count);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, 32>> direction_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

/// Quadrature and sampling configuration shared across the solver and the
/// verification suite. JSON shape:
///   { "gh_order": int, "qmc_points": int, "seed": int, "laplace_nodes": int }
/// with optional extras "mc_samples" (outer sample count for expectations over
/// N(0,I)) and "expectation" ("auto" | "quadrature").
struct QuadratureSpec {
  int gh_order = 20;
  int qmc_points = 1 << 16;
  std::uint64_t seed = 0;
  int laplace_nodes = 64;
  int mc_samples = 512;
  // "auto" lets profiles with closed-form Gaussian moments bypass the
  // tensor/QMC expectation; "quadrature" forces the generic dispatch.
  bool force_quadrature = false;

  void validate() const;

  static QuadratureSpec from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

}  // namespace oulab
