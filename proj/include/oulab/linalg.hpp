#pragma once

#include <Eigen/Dense>

namespace oulab {

/// Returns (m + mᵀ)/2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

/// Largest real part over the eigenvalues of a (the spectral abscissa).
double spectral_abscissa(const Eigen::MatrixXd& a);

/// Largest eigenvalue of the symmetric part (A + Aᵀ)/2, i.e. the 2-logarithmic
/// norm of A. Nonpositive log-norm certifies ‖e^{tA}‖₂ ≤ 1 for all t ≥ 0.
double log_norm(const Eigen::MatrixXd& a);

/// Solves the Lyapunov equation A X + X Aᵀ = -Q for symmetric Q, assuming all
/// eigenvalues of A have negative real part. Complex Schur reduction followed
/// by triangular back-substitution; the result is symmetrized.
Eigen::MatrixXd sylvester_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Symmetric PSD square root via eigendecomposition; eigenvalues below
/// `clip` are treated as zero.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m, double clip = 0.0);

/// Half-vectorization of a symmetric n×n matrix into R^{n(n+1)/2} with the
/// off-diagonal entries scaled by √2, so that Tr[C₁C₂] = svec(C₁)·svec(C₂).
Eigen::VectorXd svec(const Eigen::MatrixXd& c);

/// Inverse of svec.
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int n);

/// Dimension of the svec image for n×n symmetric matrices.
inline int svec_size(int n) { return n * (n + 1) / 2; }

}  // namespace oulab
