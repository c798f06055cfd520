#include "oulab/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oulab {

namespace {

// Golub-Welsch: nodes/weights from the symmetric tridiagonal Jacobi matrix of
// the orthogonal-polynomial recurrence. mu0 is the total mass of the weight.
GaussRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = offdiag(k);
    jacobi(k + 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights(i) = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  Eigen::VectorXd beta(order - 1);
  for (int k = 1; k < order; ++k) beta(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(beta, 2.0);
}

GaussRule gauss_legendre(int order, double a, double b) {
  GaussRule rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  rule.nodes = (rule.nodes.array() * half + mid).matrix();
  rule.weights *= half;
  return rule;
}

GaussRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  Eigen::VectorXd beta(order - 1);
  for (int k = 1; k < order; ++k) beta(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(beta, 1.0);
}

double normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_icdf: p must be in (0,1)");
  // Acklam's rational approximation, then one Halley refinement via erfc.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double NormalSampler::next() {
  const std::uint64_t bits = rng_();
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  return normal_icdf(u);
}

Eigen::VectorXd NormalSampler::vector(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = next();
  return v;
}

Eigen::MatrixXd NormalSampler::matrix(int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = next();
  }
  return m;
}

namespace {

struct SobolDim {
  int degree;
  std::uint32_t poly;  // coefficient bits a_1..a_{s-1}
  std::array<std::uint32_t, 7> m;
};

// Joe-Kuo direction numbers, dimensions 2..21.
constexpr SobolDim kSobolTable[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
};

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SobolSequence::SobolSequence(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("SobolSequence: unsupported dimension");
  direction_.resize(dim);
  state_.assign(dim, 0);
  shift_.resize(dim);
  std::uint64_t s = seed ^ 0x50b015eedULL;
  for (int d = 0; d < dim; ++d) {
    auto& v = direction_[d];
    if (d == 0) {
      for (int k = 0; k < 32; ++k) v[k] = 1u << (31 - k);
    } else {
      const SobolDim& row = kSobolTable[d - 1];
      const int deg = row.degree;
      for (int k = 0; k < deg; ++k) v[k] = row.m[k] << (31 - k);
      for (int k = deg; k < 32; ++k) {
        std::uint32_t value = v[k - deg] ^ (v[k - deg] >> deg);
        for (int i = 1; i < deg; ++i) {
          if ((row.poly >> (deg - 1 - i)) & 1u) value ^= v[k - i];
        }
        v[k] = value;
      }
    }
    shift_[d] = static_cast<std::uint32_t>(splitmix64(s) >> 32);
  }
}

Eigen::VectorXd SobolSequence::next_uniform() {
  Eigen::VectorXd u(dim_);
  for (int d = 0; d < dim_; ++d) {
    u(d) = (static_cast<double>(state_[d] ^ shift_[d]) + 0.5) * 0x1.0p-32;
  }
  // Gray-code advance: flip the direction number of the lowest zero bit.
  std::uint64_t idx = index_++;
  int c = 0;
  while (idx & 1u) {
    idx >>= 1;
    ++c;
  }
  for (int d = 0; d < dim_; ++d) state_[d] ^= direction_[d][c];
  return u;
}

Eigen::MatrixXd SobolSequence::normal_points(int count) {
  Eigen::MatrixXd pts(count, dim_);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd u = next_uniform();
    for (int d = 0; d < dim_; ++d) pts(i, d) = normal_icdf(u(d));
  }
  return pts;
}

void QuadratureSpec::validate() const {
  if (gh_order < 1 || gh_order > 64) throw std::invalid_argument("quadrature: gh_order out of range");
  if (qmc_points < 16) throw std::invalid_argument("quadrature: qmc_points too small");
  if (laplace_nodes < 8) throw std::invalid_argument("quadrature: laplace_nodes too small");
  if (mc_samples < 32) throw std::invalid_argument("quadrature: mc_samples too small");
}

QuadratureSpec QuadratureSpec::from_json(const nlohmann::json& j) {
  QuadratureSpec spec;
  if (j.contains("gh_order")) spec.gh_order = j.at("gh_order").get<int>();
  if (j.contains("qmc_points")) spec.qmc_points = j.at("qmc_points").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("laplace_nodes")) spec.laplace_nodes = j.at("laplace_nodes").get<int>();
  if (j.contains("mc_samples")) spec.mc_samples = j.at("mc_samples").get<int>();
  if (j.contains("expectation")) {
    const std::string mode = j.at("expectation").get<std::string>();
    if (mode == "auto") {
      spec.force_quadrature = false;
    } else if (mode == "quadrature") {
      spec.force_quadrature = true;
    } else {
      throw std::invalid_argument("quadrature: expectation must be 'auto' or 'quadrature'");
    }
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json QuadratureSpec::to_json() const {
  nlohmann::ordered_json j;
  j["gh_order"] = gh_order;
  j["qmc_points"] = qmc_points;
  j["seed"] = seed;
  j["laplace_nodes"] = laplace_nodes;
  j["mc_samples"] = mc_samples;
  j["expectation"] = force_quadrature ? "quadrature" : "auto";
  return j;
}

}  // namespace oulab
