#include "oulab/mehler.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "oulab/linalg.hpp"

namespace oulab {

LaplaceRule make_laplace_rule(double lambda, int nodes) {
  if (!(lambda > 0.0)) throw std::invalid_argument("laplace rule: lambda must be positive");
  const double t_star = std::log(1e12) / lambda;  // e^{-λT*} = 1e-12
  // Composite Gauss-Legendre on a geometric mesh graded toward t = 0; the
  // grading resolves stiff semigroup transients (‖b‖ ≫ λ) that a single
  // exponential-substitution grid misses.
  const double t_min = std::min(1e-7, 1e-3 * t_star);
  const int per_panel = std::clamp(nodes / 8, 6, 16);
  const int decades = static_cast<int>(std::ceil(std::log10(t_star / t_min)));
  const int panels_per_decade = 3;
  const int panels = decades * panels_per_decade;
  const double ratio = std::pow(t_star / t_min, 1.0 / panels);

  LaplaceRule rule;
  rule.t.resize((panels + 1) * per_panel);
  rule.w.resize((panels + 1) * per_panel);
  int k = 0;
  const auto add_panel = [&](double lo, double hi) {
    const GaussRule gl = gauss_legendre(per_panel, lo, hi);
    for (int i = 0; i < per_panel; ++i) {
      rule.t(k) = gl.nodes(i);
      rule.w(k) = gl.weights(i) * std::exp(-lambda * gl.nodes(i));
      ++k;
    }
  };
  add_panel(0.0, t_min);
  double lo = t_min;
  for (int p = 0; p < panels; ++p) {
    const double hi = (p + 1 == panels) ? t_star : lo * ratio;
    add_panel(lo, hi);
    lo = hi;
  }
  return rule;
}

MehlerKernel::MehlerKernel(GalerkinPair pair) : pair_(std::move(pair)) {
  m_ = pair_.b_mat.transpose();
  const double alpha = spectral_abscissa(m_);
  if (alpha >= 0.0) {
    throw std::runtime_error("MehlerKernel: drift matrix not Hurwitz (abscissa " +
                             std::to_string(alpha) + "); regularize the pair");
  }
  sigma_inf_ = sylvester_lyapunov(m_, pair_.q_mat);
  // Geometric grid used by the Σ diagnostics.
  const int grid_nodes = 64;
  sigma_grid_.resize(grid_nodes);
  const double lo = 1e-3, hi = 50.0;
  for (int i = 0; i < grid_nodes; ++i) {
    sigma_grid_[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (grid_nodes - 1));
  }
}

Eigen::MatrixXd MehlerKernel::propagator(double t) const { return (t * m_).exp(); }

Eigen::MatrixXd MehlerKernel::sigma(double t) const {
  if (t < 0.0) throw std::invalid_argument("sigma: t must be nonnegative");
  if (t == 0.0) return Eigen::MatrixXd::Zero(pair_.n, pair_.n);
  // Σ_t = Σ_∞ - e^{tM} Σ_∞ e^{tMᵀ}, exact and stable for Hurwitz M.
  const Eigen::MatrixXd e = propagator(t);
  return symmetrize(sigma_inf_ - e * sigma_inf_ * e.transpose());
}

void MehlerKernel::make_zrule(const QuadratureSpec& quad, Eigen::MatrixXd& zpts,
                              Eigen::VectorXd& zw) const {
  const int n = pair_.n;
  if (n <= 4) {
    const GaussRule gh = gauss_hermite(quad.gh_order);
    const int order = quad.gh_order;
    int total = 1;
    for (int d = 0; d < n; ++d) total *= order;
    zpts.resize(total, n);
    zw.resize(total);
    for (int idx = 0; idx < total; ++idx) {
      int rest = idx;
      double w = 1.0;
      for (int d = 0; d < n; ++d) {
        const int i = rest % order;
        rest /= order;
        zpts(idx, d) = gh.nodes(i);
        w *= gh.weights(i);
      }
      zw(idx) = w;
    }
  } else {
    SobolSequence sobol(n, quad.seed);
    zpts = sobol.normal_points(quad.qmc_points);
    zw = Eigen::VectorXd::Constant(quad.qmc_points, 1.0 / quad.qmc_points);
  }
}

MehlerKernel::Plan MehlerKernel::plan(double lambda, const QuadratureSpec& quad) const {
  Plan p;
  p.lambda = lambda;
  p.rule = make_laplace_rule(lambda, quad.laplace_nodes);
  p.force_quadrature = quad.force_quadrature;
  const int nt = static_cast<int>(p.rule.t.size());
  p.prop.reserve(nt);
  p.sig.reserve(nt);
  p.sqrt_sig.reserve(nt);
  for (int i = 0; i < nt; ++i) {
    p.prop.push_back(propagator(p.rule.t(i)));
    p.sig.push_back(sigma(p.rule.t(i)));
    p.sqrt_sig.push_back(matrix_sqrt_psd(p.sig.back()));
  }
  make_zrule(quad, p.zpts, p.zw);
  return p;
}

MehlerKernel::Expectation MehlerKernel::gaussian_expectation(
    const CylinderFunction& phi, const Eigen::VectorXd& mean, const Eigen::MatrixXd& sig,
    const Eigen::MatrixXd& sqrt_sig, const Eigen::MatrixXd& zpts, const Eigen::VectorXd& zw,
    bool force_quadrature, bool want_gradient, bool want_hessian) const {
  const int n = pair_.n;
  Expectation e;
  if (!force_quadrature && phi.has_gaussian_moments()) {
    e.value = phi.moment_value(mean, sig);
    if (want_gradient) e.gradient = phi.moment_gradient(mean, sig);
    if (want_hessian) e.hessian = phi.moment_hessian(mean, sig);
    return e;
  }
  e.value = 0.0;
  if (want_gradient) e.gradient = Eigen::VectorXd::Zero(n);
  if (want_hessian) e.hessian = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < zpts.rows(); ++i) {
    x.noalias() = sqrt_sig * zpts.row(i).transpose();
    x += mean;
    const double w = zw(i);
    e.value += w * phi.value(x);
    if (want_gradient) e.gradient += w * phi.gradient(x);
    if (want_hessian) e.hessian += w * phi.hessian(x);
  }
  return e;
}

double MehlerKernel::semigroup_apply(double t, const CylinderFunction& phi,
                                     const Eigen::VectorXd& xi,
                                     const QuadratureSpec& quad) const {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
  if (t == 0.0) return phi.value(xi);
  Eigen::MatrixXd zpts;
  Eigen::VectorXd zw;
  const bool need_rule = quad.force_quadrature || !phi.has_gaussian_moments();
  if (need_rule) make_zrule(quad, zpts, zw);
  const Eigen::MatrixXd sig = sigma(t);
  return gaussian_expectation(phi, propagator(t) * xi, sig, matrix_sqrt_psd(sig), zpts, zw,
                              quad.force_quadrature, false, false)
      .value;
}

Eigen::VectorXd MehlerKernel::semigroup_gradient(double t, const CylinderFunction& phi,
                                                 const Eigen::VectorXd& xi,
                                                 const QuadratureSpec& quad) const {
  if (t == 0.0) return phi.gradient(xi);
  Eigen::MatrixXd zpts;
  Eigen::VectorXd zw;
  if (quad.force_quadrature || !phi.has_gaussian_moments()) make_zrule(quad, zpts, zw);
  const Eigen::MatrixXd prop = propagator(t);
  const Eigen::MatrixXd sig = sigma(t);
  const Expectation e = gaussian_expectation(phi, prop * xi, sig, matrix_sqrt_psd(sig), zpts, zw,
                                             quad.force_quadrature, true, false);
  return prop.transpose() * e.gradient;
}

Eigen::MatrixXd MehlerKernel::semigroup_hessian(double t, const CylinderFunction& phi,
                                                const Eigen::VectorXd& xi,
                                                const QuadratureSpec& quad) const {
  if (t == 0.0) return phi.hessian(xi);
  Eigen::MatrixXd zpts;
  Eigen::VectorXd zw;
  if (quad.force_quadrature || !phi.has_gaussian_moments()) make_zrule(quad, zpts, zw);
  const Eigen::MatrixXd prop = propagator(t);
  const Eigen::MatrixXd sig = sigma(t);
  const Expectation e = gaussian_expectation(phi, prop * xi, sig, matrix_sqrt_psd(sig), zpts, zw,
                                             quad.force_quadrature, false, true);
  return prop.transpose() * e.hessian * prop;
}

SolvedPoint MehlerKernel::resolvent_solve(const Plan& plan, const CylinderFunction& phi,
                                          const Eigen::VectorXd& xi, bool want_gradient,
                                          bool want_hessian) const {
  const int n = pair_.n;
  if (xi.size() != n) throw std::invalid_argument("resolvent_solve: xi size mismatch");
  SolvedPoint out;
  out.xi = xi;
  out.value = 0.0;
  out.gradient = Eigen::VectorXd::Zero(n);
  out.hessian = Eigen::MatrixXd::Zero(n, n);
  const int nt = static_cast<int>(plan.rule.t.size());
  for (int i = 0; i < nt; ++i) {
    const Eigen::MatrixXd& prop = plan.prop[i];
    const Expectation e =
        gaussian_expectation(phi, prop * xi, plan.sig[i], plan.sqrt_sig[i], plan.zpts, plan.zw,
                             plan.force_quadrature, want_gradient, want_hessian);
    const double w = plan.rule.w(i);
    out.value += w * e.value;
    if (want_gradient) out.gradient.noalias() += w * (prop.transpose() * e.gradient);
    if (want_hessian) out.hessian.noalias() += w * (prop.transpose() * e.hessian * prop);
  }
  return out;
}

double MehlerKernel::resolvent_apply(double lambda, const CylinderFunction& phi,
                                     const Eigen::VectorXd& xi, const QuadratureSpec& quad) const {
  return resolvent_solve(plan(lambda, quad), phi, xi, false, false).value;
}

Eigen::VectorXd MehlerKernel::resolvent_gradient(double lambda, const CylinderFunction& phi,
                                                 const Eigen::VectorXd& xi,
                                                 const QuadratureSpec& quad) const {
  return resolvent_solve(plan(lambda, quad), phi, xi, true, false).gradient;
}

Eigen::MatrixXd MehlerKernel::resolvent_hessian(double lambda, const CylinderFunction& phi,
                                                const Eigen::VectorXd& xi,
                                                const QuadratureSpec& quad) const {
  return resolvent_solve(plan(lambda, quad), phi, xi, false, true).hessian;
}

double pde_residual(const GalerkinPair& pair, double lambda, const CylinderFunction& phi,
                    const std::vector<SolvedPoint>& points) {
  double worst = 0.0;
  for (const auto& p : points) {
    const double trace_term = 0.5 * pair.q_mat.cwiseProduct(p.hessian).sum();
    const double drift_term = p.xi.dot(pair.b_mat * p.gradient);
    const double res = std::abs(lambda * p.value - trace_term - drift_term - phi.value(p.xi));
    worst = std::max(worst, res);
  }
  return worst;
}

}  // namespace oulab
