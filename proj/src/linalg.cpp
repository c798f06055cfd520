#include "oulab/linalg.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oulab {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

double log_norm(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a));
  return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd sylvester_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows()) {
    throw std::invalid_argument("sylvester_lyapunov: shape mismatch");
  }
  const Eigen::Index n = a.rows();
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a);
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();

  // T Y + Y T^H = C with C = -U^H Q U; A real, so Aᵀ = A^H as a complex matrix.
  Eigen::MatrixXcd c = -(u.adjoint() * q * u);
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      std::complex<double> rhs = c(i, j);
      for (Eigen::Index k = i + 1; k < n; ++k) rhs -= t(i, k) * y(k, j);
      for (Eigen::Index k = j + 1; k < n; ++k) rhs -= y(i, k) * std::conj(t(j, k));
      const std::complex<double> denom = t(i, i) + std::conj(t(j, j));
      if (std::abs(denom) < 1e-300) {
        throw std::runtime_error("sylvester_lyapunov: singular pencil (drift not Hurwitz?)");
      }
      y(i, j) = rhs / denom;
    }
  }
  Eigen::MatrixXd x = (u * y * u.adjoint()).real();
  return symmetrize(x);
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m, double clip) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m));
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > clip ? std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXd svec(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  Eigen::VectorXd v(svec_size(n));
  const double rt2 = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      v(k++) = (i == j) ? c(i, j) : rt2 * c(i, j);
    }
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int n) {
  if (v.size() != svec_size(n)) throw std::invalid_argument("smat: size mismatch");
  Eigen::MatrixXd c(n, n);
  const double irt2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double x = v(k++);
      if (i == j) {
        c(i, j) = x;
      } else {
        c(i, j) = irt2 * x;
        c(j, i) = irt2 * x;
      }
    }
  }
  return c;
}

}  // namespace oulab
