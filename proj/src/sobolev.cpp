#include "oulab/sobolev.hpp"

#include <cmath>
#include <stdexcept>

#include "oulab/linalg.hpp"

namespace oulab {

MeanStat batch_mean(const Eigen::VectorXd& values, int batches) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw std::invalid_argument("batch_mean: empty sample");
  MeanStat stat;
  stat.mean = values.mean();
  if (batches < 2 || n < 2 * batches) {
    stat.error_bar = 0.0;
    return stat;
  }
  const int per = n / batches;
  double ss = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double m = values.segment(b * per, per).mean();
    ss += (m - stat.mean) * (m - stat.mean);
  }
  stat.error_bar = std::sqrt(ss / (batches - 1.0) / batches);
  return stat;
}

SobolevCalc::SobolevCalc(const GalerkinPair& pair) : pair_(pair) {
  chol_q_ = matrix_sqrt_psd(pair.q_mat);
}

double SobolevCalc::dh_sq(const SolvedPoint& p) const {
  return p.gradient.dot(pair_.q_mat * p.gradient);
}

double SobolevCalc::dh2_hs_sq(const SolvedPoint& p) const {
  return (chol_q_.transpose() * p.hessian * chol_q_).squaredNorm();
}

double SobolevCalc::dainf_sq(const SolvedPoint& p) const {
  return (pair_.b_mat * p.gradient).squaredNorm();
}

double SobolevCalc::energy_density(const SolvedPoint& u, const SolvedPoint& w) const {
  return -w.gradient.dot(pair_.b_mat * u.gradient);
}

NormSet norms(const std::vector<SolvedPoint>& samples, const GalerkinPair& pair) {
  if (samples.empty()) throw std::invalid_argument("norms: empty sample set");
  SobolevCalc calc(pair);
  double l2 = 0.0, dh = 0.0, hs = 0.0, da = 0.0;
  for (const auto& p : samples) {
    l2 += calc.l2_sq(p);
    dh += calc.dh_sq(p);
    hs += calc.dh2_hs_sq(p);
    da += calc.dainf_sq(p);
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  return NormSet{std::sqrt(l2 * inv), std::sqrt(dh * inv), std::sqrt(hs * inv),
                 std::sqrt(da * inv)};
}

double energy_form(const std::vector<SolvedPoint>& u, const std::vector<SolvedPoint>& w,
                   const GalerkinPair& pair) {
  if (u.size() != w.size() || u.empty()) {
    throw std::invalid_argument("energy_form: sample sets must match and be nonempty");
  }
  SobolevCalc calc(pair);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += calc.energy_density(u[i], w[i]);
  return acc / static_cast<double>(u.size());
}

double divergence_h(const std::vector<HFieldComponent>& field, const GalerkinPair& pair,
                    const Eigen::VectorXd& xi) {
  std::vector<std::pair<CylinderFunction, Eigen::VectorXd>> combo;
  combo.reserve(field.size());
  for (const auto& part : field) {
    if (part.direction < 0 || part.direction >= pair.n) {
      throw std::invalid_argument("divergence_h: direction not of admissible form");
    }
    combo.emplace_back(part.profile, Eigen::VectorXd::Unit(pair.n, part.direction));
  }
  return divergence_h_combo(combo, pair, xi);
}

double divergence_h_combo(const std::vector<std::pair<CylinderFunction, Eigen::VectorXd>>& field,
                          const GalerkinPair& pair, const Eigen::VectorXd& xi) {
  if (xi.size() != pair.n) throw std::invalid_argument("divergence_h: xi size mismatch");
  double acc = 0.0;
  for (const auto& [phi, coeff] : field) {
    if (coeff.size() != pair.n) {
      throw std::invalid_argument("divergence_h: direction not of admissible form");
    }
    const Eigen::VectorXd v = pair.b_mat * coeff;  // pairing data of the direction
    acc -= phi.gradient(xi).dot(v) - phi.value(xi) * v.dot(xi);
  }
  return acc;
}

Eigen::MatrixXd direction_gram_h(const GalerkinPair& pair) {
  const Eigen::LLT<Eigen::MatrixXd> llt(pair.q_mat);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("direction_gram_h: q not positive definite");
  }
  return symmetrize(pair.b_mat.transpose() * llt.solve(pair.b_mat));
}

Eigen::MatrixXd direction_gram_vstar(const GalerkinPair& pair) {
  return symmetrize(pair.b_mat.transpose() * pair.b_mat);
}

TwoSided hessian_chain_experiment(const GalerkinPair& pair, const Eigen::MatrixXd& hessian) {
  const Eigen::LLT<Eigen::MatrixXd> guard(pair.q_mat);
  if (guard.info() != Eigen::Success) {
    throw std::runtime_error("hessian_chain_experiment: q not positive definite");
  }
  // Symmetric whitener l with l² = q: C̃ = l H l, Ĥ = l⁻¹ b l⁻¹; then
  // ‖ĤC̃‖²_F = Tr[bᵀq⁻¹b H q H] and ‖C̃‖²_F = Tr[q H q H].
  const Eigen::MatrixXd l = matrix_sqrt_psd(pair.q_mat);
  const Eigen::MatrixXd linv = l.inverse();
  const Eigen::MatrixXd c_tilde = l * hessian * l;
  const Eigen::MatrixXd h_white = linv * pair.b_mat * linv;
  TwoSided sides;
  sides.lhs = (h_white * c_tilde).norm();
  sides.rhs = 0.5 * c_tilde.norm();
  return sides;
}

}  // namespace oulab
