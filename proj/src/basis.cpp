#include "oulab/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "oulab/linalg.hpp"

namespace oulab {

ThetaBasis ThetaBasis::from_frame(Eigen::MatrixXd frame, const Eigen::MatrixXd& q_inf) {
  ThetaBasis basis;
  basis.images = q_inf * frame;
  basis.frame = std::move(frame);
  return basis;
}

std::vector<Eigen::VectorXd> canonical_seeds(int dim) {
  std::vector<Eigen::VectorXd> seeds;
  seeds.reserve(dim);
  for (int i = 0; i < dim; ++i) seeds.push_back(Eigen::VectorXd::Unit(dim, i));
  return seeds;
}

ThetaBasis gram_schmidt_theta(const Eigen::MatrixXd& q_inf,
                              const std::vector<Eigen::VectorXd>& seeds, int n) {
  const Eigen::Index dim = q_inf.rows();
  if (q_inf.cols() != dim) throw std::invalid_argument("gram_schmidt_theta: q_inf not square");
  if (n < 1) throw std::invalid_argument("gram_schmidt_theta: n must be >= 1");

  ThetaBasis basis;
  basis.frame.resize(dim, n);
  int cols = 0;
  const auto hinf_dot = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return u.dot(q_inf * v);
  };

  for (int s = 0; s < static_cast<int>(seeds.size()) && cols < n; ++s) {
    const Eigen::VectorXd& seed = seeds[s];
    if (seed.size() != dim) throw std::invalid_argument("gram_schmidt_theta: seed size mismatch");
    const double seed_norm = std::sqrt(std::max(0.0, hinf_dot(seed, seed)));

    Eigen::VectorXd v = seed;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < cols; ++j) {
        const double coeff = hinf_dot(v, basis.frame.col(j));
        v -= coeff * basis.frame.col(j);
      }
    }
    const double res = std::sqrt(std::max(0.0, hinf_dot(v, v)));
    if (seed_norm == 0.0 || res < 1e-12 * seed_norm) {
      basis.gram_log.push_back({s, res, false});
      continue;
    }
    basis.frame.col(cols) = v / res;
    basis.gram_log.push_back({s, res, true});
    ++cols;
  }
  if (cols < n) {
    throw std::runtime_error("insufficient seed span: got " + std::to_string(cols) +
                             " independent directions, need " + std::to_string(n));
  }
  basis.images = q_inf * basis.frame;
  return basis;
}

Eigen::VectorXd project_theta(const ThetaBasis& basis, const Eigen::VectorXd& x) {
  if (x.size() != basis.frame.rows()) throw std::invalid_argument("project_theta: size mismatch");
  return basis.frame.transpose() * x;
}

Eigen::MatrixXd pushforward_covariance(const ThetaBasis& basis, const Eigen::MatrixXd& q_inf) {
  return symmetrize(basis.frame.transpose() * q_inf * basis.frame);
}

}  // namespace oulab
