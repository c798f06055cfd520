#include "oulab/galerkin.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "oulab/linalg.hpp"

namespace oulab {

GalerkinPair build_pair(const SpectralModel& model, const Eigen::MatrixXd& q_inf,
                        const ThetaBasis& basis, int n, double epsilon) {
  if (n < 1 || n > basis.width()) throw std::invalid_argument("build_pair: n out of range");
  if (basis.dim() != model.dim || q_inf.rows() != model.dim) {
    throw std::invalid_argument("build_pair: dimension mismatch");
  }
  if (epsilon < 0.0) throw std::invalid_argument("build_pair: epsilon must be nonnegative");
  const Eigen::MatrixXd f = basis.frame.leftCols(n);
  GalerkinPair pair;
  pair.n = n;
  pair.epsilon = epsilon;
  pair.q_mat = symmetrize(f.transpose() * model.diffusion * f) +
               epsilon * Eigen::MatrixXd::Identity(n, n);
  pair.b_mat = f.transpose() * (q_inf * model.drift.transpose()) * f -
               0.5 * epsilon * Eigen::MatrixXd::Identity(n, n);
  return pair;
}

double check_dissipation(const GalerkinPair& pair) {
  return (pair.b_mat + pair.b_mat.transpose() + pair.q_mat).norm();
}

double nu_min(const GalerkinPair& pair) {
  const int n = pair.n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(pair.q_mat);
  if (check.eigenvalues().minCoeff() <= 0.0) {
    throw std::runtime_error("Q not positive definite: regularize first");
  }
  const Eigen::MatrixXd k = pair.b_mat - pair.b_mat.transpose();
  const int m = svec_size(n);
  Eigen::MatrixXd lhs(m, m);  // svec matrix of C ↦ -KCK
  Eigen::MatrixXd rhs(m, m);  // svec matrix of C ↦ qCq
  for (int col = 0; col < m; ++col) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(col) = 1.0;
    const Eigen::MatrixXd c = smat(e, n);
    lhs.col(col) = svec(symmetrize(-k * c * k));
    rhs.col(col) = svec(symmetrize(pair.q_mat * c * pair.q_mat));
  }
  lhs = symmetrize(lhs);
  rhs = symmetrize(rhs);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(lhs, rhs);
  if (ges.info() != Eigen::Success) {
    throw std::runtime_error("Q not positive definite: pencil solve failed");
  }
  return std::max(0.0, ges.eigenvalues().maxCoeff());
}

HypothesisReport hypothesis_report(const SpectralModel& model, const Eigen::MatrixXd& q_inf,
                                   const GalerkinPair& pair, std::optional<double> nu_bound) {
  HypothesisReport report;
  report.c_rkhs = rkhs_constant(model, q_inf);
  report.nu_min = nu_min(pair);
  report.nu_ok = report.nu_min < 1.0;
  report.nu_bound = nu_bound;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(pair.q_mat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(symmetrize(pair.b_mat));
  report.q_min_eig = eq.eigenvalues().minCoeff();
  report.sym_b_max_eig = eb.eigenvalues().maxCoeff();
  report.skew_norm = (pair.b_mat - pair.b_mat.transpose()).norm();
  return report;
}

double rkhs_constant(const SpectralModel& model, const Eigen::MatrixXd& q_inf) {
  const int dim = model.dim;
  const Eigen::MatrixXd b0 = q_inf * model.drift.transpose();  // Q∞Aᵀ

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.diffusion);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double cutoff = 1e-12 * std::max(1.0, lam_max);

  std::vector<int> range_idx;
  for (int i = 0; i < dim; ++i) {
    if (es.eigenvalues()(i) > cutoff) range_idx.push_back(i);
  }
  const int r = static_cast<int>(range_idx.size());
  if (r == 0) throw std::runtime_error("image escapes H: Q vanishes on the truncation");

  Eigen::MatrixXd range_basis(dim, r);
  Eigen::VectorXd range_eigs(r);
  for (int i = 0; i < r; ++i) {
    range_basis.col(i) = es.eigenvectors().col(range_idx[i]);
    range_eigs(i) = es.eigenvalues()(range_idx[i]);
  }

  const double scale = std::max(1.0, b0.norm());
  if (r < dim) {
    // Output must stay inside range(Q) ...
    const Eigen::MatrixXd proj_out = b0 - range_basis * (range_basis.transpose() * b0);
    if (proj_out.norm() > 1e-10 * scale) {
      throw std::runtime_error("image escapes H: Q_inf*A^T leaves range(Q), defect " +
                               std::to_string(proj_out.norm()));
    }
    // ... and kernel functionals must map to zero, otherwise no finite c exists.
    Eigen::MatrixXd kernel_basis(dim, dim - r);
    int k = 0;
    for (int i = 0; i < dim; ++i) {
      bool in_range = false;
      for (int idx : range_idx) in_range |= (idx == i);
      if (!in_range) kernel_basis.col(k++) = es.eigenvectors().col(i);
    }
    const Eigen::MatrixXd on_kernel = b0 * kernel_basis;
    if (on_kernel.norm() > 1e-10 * scale) {
      throw std::runtime_error("image escapes H: |i_inf*A^T x*|_H > 0 on ker Q, defect " +
                               std::to_string(on_kernel.norm()));
    }
  }

  // Pencil sup ⟨Q⁺ B₀x, B₀x⟩ / ⟨Qx, x⟩ over x in range coordinates.
  const Eigen::MatrixXd br = b0 * range_basis;                       // dim × r
  const Eigen::MatrixXd br_range = range_basis.transpose() * br;     // r × r, range coords
  const Eigen::MatrixXd q_plus = range_eigs.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd num = symmetrize(br_range.transpose() * q_plus * br_range);
  const Eigen::MatrixXd den = range_eigs.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(num, den);
  if (ges.info() != Eigen::Success) throw std::runtime_error("rkhs_constant: pencil solve failed");
  return std::sqrt(std::max(0.0, ges.eigenvalues().maxCoeff()));
}

}  // namespace oulab
