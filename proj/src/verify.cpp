#include "oulab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oulab/basis.hpp"
#include "oulab/linalg.hpp"

namespace oulab {

namespace {

constexpr int kBatches = 16;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Eigen::VectorXd batch_means(const Eigen::VectorXd& density, int batches) {
  const int per = static_cast<int>(density.size()) / batches;
  Eigen::VectorXd out(batches);
  for (int b = 0; b < batches; ++b) out(b) = density.segment(b * per, per).mean();
  return out;
}

double bar_from_batches(const Eigen::VectorXd& batch_margins) {
  const int b = static_cast<int>(batch_margins.size());
  const double mean = batch_margins.mean();
  double ss = 0.0;
  for (int i = 0; i < b; ++i) ss += (batch_margins(i) - mean) * (batch_margins(i) - mean);
  return std::sqrt(ss / (b - 1.0) / b);
}

std::string status_inequality(double margin, double bar, double scale) {
  const double slack = 1e-9 * scale;
  if (margin + slack >= 2.0 * bar) return "pass";
  if (margin <= -(2.0 * bar + slack)) return "fail";
  return "inconclusive";
}

std::string status_identity(double residual, double bar, double scale) {
  const double slack = 1e-9 * scale;
  if (std::abs(residual) <= 2.0 * bar + slack) return "pass";
  if (std::abs(residual) > 4.0 * bar + slack) return "fail";
  return "inconclusive";
}

CriterionResult make_inequality(std::string id, double lhs, double rhs,
                                const Eigen::VectorXd& batch_margins) {
  CriterionResult c;
  c.id = std::move(id);
  c.kind = "inequality";
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  c.error_bar = bar_from_batches(batch_margins);
  c.status = status_inequality(c.margin, c.error_bar, std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  return c;
}

CriterionResult make_identity(std::string id, double residual, const Eigen::VectorXd& batch_res,
                              double scale) {
  CriterionResult c;
  c.id = std::move(id);
  c.kind = "identity";
  c.lhs = residual;
  c.rhs = 0.0;
  c.margin = -std::abs(residual);
  c.error_bar = bar_from_batches(batch_res);
  c.status = status_identity(residual, c.error_bar, std::max(1.0, scale));
  return c;
}

std::string worst_status(const std::vector<CriterionResult>& criteria) {
  bool inconclusive = false;
  for (const auto& c : criteria) {
    if (c.status == "fail") return "fail";
    if (c.status == "inconclusive") inconclusive = true;
  }
  return inconclusive ? "inconclusive" : "pass";
}

nlohmann::ordered_json criterion_to_json(const CriterionResult& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["kind"] = c.kind;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["margin"] = c.margin;
  j["error_bar"] = c.error_bar;
  j["status"] = c.status;
  return j;
}

CriterionResult criterion_from_json(const nlohmann::json& j) {
  CriterionResult c;
  c.id = j.at("id").get<std::string>();
  c.kind = j.at("kind").get<std::string>();
  c.lhs = j.at("lhs").get<double>();
  c.rhs = j.at("rhs").get<double>();
  c.margin = j.at("margin").get<double>();
  c.error_bar = j.at("error_bar").get<double>();
  c.status = j.at("status").get<std::string>();
  return c;
}

}  // namespace

std::vector<CylinderFunction> weak_test_battery(int n) {
  std::vector<CylinderFunction> battery;
  Eigen::VectorXd a1 = Eigen::VectorXd::Zero(n);
  a1(0) = 1.0;
  battery.push_back(CylinderFunction::cosine(a1, 0.0));

  Eigen::VectorXd a2 = Eigen::VectorXd::Zero(n);
  a2(std::min(1, n - 1)) = 0.5;
  battery.push_back(CylinderFunction::cosine(a2, 0.5));

  battery.push_back(CylinderFunction::cosine(Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n)), 0.0));

  Eigen::VectorXd a4(n);
  for (int i = 0; i < n; ++i) a4(i) = ((i % 2) ? -1.0 : 1.0) / std::sqrt(n);
  battery.push_back(CylinderFunction::cosine(a4, 1.0));

  Eigen::VectorXd a5(n);
  for (int i = 0; i < n; ++i) a5(i) = 1.0 / (i + 2.0);
  a5 /= a5.norm();
  battery.push_back(CylinderFunction::cosine(a5, -0.5));
  return battery;
}

VerificationReport solve_and_verify(const SpectralModel& model, double lambda,
                                    const CylinderFunction& phi, const std::vector<int>& ladder,
                                    const std::vector<double>& eps_grid,
                                    const QuadratureSpec& quad) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_and_verify: lambda must be positive");
  if (ladder.empty()) throw std::invalid_argument("solve_and_verify: empty ladder");
  quad.validate();
  const int n0 = phi.arity();
  std::vector<double> eps = eps_grid.empty() ? std::vector<double>{0.0} : eps_grid;
  for (int n : ladder) {
    if (n < std::max(1, n0)) throw std::invalid_argument("solve_and_verify: ladder entry below N0");
    if (n > model.dim) throw std::invalid_argument("solve_and_verify: ladder entry exceeds dim");
  }
  const DegeneracyFlag deg = degeneracy(model);
  if (!deg.nondegenerate && std::none_of(eps.begin(), eps.end(), [](double e) { return e > 0.0; })) {
    throw std::runtime_error("regularization required: degenerate Q needs a positive epsilon");
  }

  VerificationReport report;
  report.model_label = model.label;
  report.model_dim = model.dim;
  report.lambda = lambda;
  report.ladder = ladder;
  report.eps_grid = eps;
  report.phi = phi.to_json();
  report.quad = quad;

  const CovariancePack pack = covariance_infinity(model);
  const int n_max = *std::max_element(ladder.begin(), ladder.end());
  const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(model.dim), n_max);

  const int samples = std::max(kBatches * 2, (quad.mc_samples / kBatches) * kBatches);

  for (double epsilon : eps) {
    for (int n : ladder) {
      GalerkinPair pair = build_pair(model, pack.q_inf, basis, n, epsilon);
      CellReport cell;
      cell.n = n;
      cell.epsilon = epsilon;
      cell.dissipation_residual = check_dissipation(pair);
      try {
        cell.nu = nu_min(pair);
        cell.nu_pencil_ok = true;
      } catch (const std::exception&) {
        cell.nu = 1.0;  // degenerate ε=0 comparison run: (d) degrades gracefully
        cell.nu_pencil_ok = false;
      }

      MehlerKernel kernel(std::move(pair));
      const MehlerKernel::Plan plan = kernel.plan(lambda, quad);
      // Samples depend on (seed, n) only, so ε-cells of equal width share them.
      NormalSampler sampler(mix_seed(quad.seed, static_cast<std::uint64_t>(n)));
      const Eigen::MatrixXd xis = sampler.matrix(samples, n);

      std::vector<SolvedPoint> solved(samples);
      for (int s = 0; s < samples; ++s) {
        solved[s] = kernel.resolvent_solve(plan, phi, xis.row(s).transpose(), true, true);
      }

      const SobolevCalc calc(kernel.pair());
      Eigen::VectorXd d_phi_sq(samples), d_v_sq(samples), d_dh(samples), d_hs(samples),
          d_da(samples), d_energy(samples);
      for (int s = 0; s < samples; ++s) {
        const double phival = phi.value(solved[s].xi);
        d_phi_sq(s) = phival * phival;
        d_v_sq(s) = calc.l2_sq(solved[s]);
        d_dh(s) = calc.dh_sq(solved[s]);
        d_hs(s) = calc.dh2_hs_sq(solved[s]);
        d_da(s) = calc.dainf_sq(solved[s]);
        d_energy(s) = lambda * d_v_sq(s) + 0.5 * d_dh(s) - phival * solved[s].value;
      }

      const auto b_phi_sq = batch_means(d_phi_sq, kBatches);
      const auto b_v_sq = batch_means(d_v_sq, kBatches);
      const auto b_dh = batch_means(d_dh, kBatches);
      const auto b_hs = batch_means(d_hs, kBatches);
      const auto b_da = batch_means(d_da, kBatches);
      const auto b_energy = batch_means(d_energy, kBatches);

      cell.norm_phi = std::sqrt(d_phi_sq.mean());
      cell.norms.l2 = std::sqrt(d_v_sq.mean());
      cell.norms.dh = std::sqrt(d_dh.mean());
      cell.norms.dh2_hs = std::sqrt(d_hs.mean());
      cell.norms.pn_dainf = std::sqrt(d_da.mean());
      cell.energy_residual = d_energy.mean();

      const auto safe_sqrt = [](double x) { return std::sqrt(std::max(0.0, x)); };

      // (a) a-priori bounds ‖V‖ ≤ ‖φ‖/λ and ‖D_HV‖ ≤ √(2/λ)‖φ‖.
      {
        Eigen::VectorXd margins(kBatches);
        for (int b = 0; b < kBatches; ++b) {
          margins(b) = safe_sqrt(b_phi_sq(b)) / lambda - safe_sqrt(b_v_sq(b));
        }
        cell.criteria.push_back(
            make_inequality("a_value", cell.norms.l2, cell.norm_phi / lambda, margins));
      }
      {
        const double factor = std::sqrt(2.0 / lambda);
        Eigen::VectorXd margins(kBatches);
        for (int b = 0; b < kBatches; ++b) {
          margins(b) = factor * safe_sqrt(b_phi_sq(b)) - safe_sqrt(b_dh(b));
        }
        cell.criteria.push_back(
            make_inequality("a_gradient", cell.norms.dh, factor * cell.norm_phi, margins));
      }
      // (b) energy identity λ‖V‖² + ½‖D_HV‖² = E[φV].
      cell.criteria.push_back(make_identity("b_energy", cell.energy_residual, b_energy,
                                            cell.norm_phi * cell.norm_phi));
      // (c) weak form against the fixed cosine battery.
      const std::vector<CylinderFunction> battery = weak_test_battery(n);
      for (std::size_t gi = 0; gi < battery.size(); ++gi) {
        Eigen::VectorXd density(samples);
        for (int s = 0; s < samples; ++s) {
          const auto& pt = solved[s];
          const double g = battery[gi].value(pt.xi);
          const Eigen::VectorXd gg = battery[gi].gradient(pt.xi);
          const double e_den = -gg.dot(kernel.pair().b_mat * pt.gradient);
          const double rhs_den = (phi.value(pt.xi) - lambda * pt.value) * g;
          density(s) = e_den - rhs_den;
        }
        const double res = density.mean();
        cell.weak_residuals.push_back(res);
        cell.criteria.push_back(make_identity("c_weak_" + std::to_string(gi + 1), res,
                                              batch_means(density, kBatches),
                                              cell.norm_phi * cell.norm_phi));
      }
      // (d) maximal regularity ¼(1-ν)‖D²_HV‖² + ‖PₙD_{A∞}V‖² ≤ 2‖φ‖².
      // When the trace hypothesis fails (ν ≥ 1) the Hessian coefficient
      // degrades to zero and only the D_{A∞} part remains testable.
      {
        const double coeff = 0.25 * std::max(0.0, 1.0 - cell.nu);
        Eigen::VectorXd margins(kBatches);
        for (int b = 0; b < kBatches; ++b) {
          margins(b) = 2.0 * b_phi_sq(b) - (coeff * b_hs(b) + b_da(b));
        }
        const double lhs = coeff * d_hs.mean() + d_da.mean();
        cell.criteria.push_back(make_inequality(
            "d_max_regularity", lhs, 2.0 * cell.norm_phi * cell.norm_phi, margins));
      }
      // (e) total-bound constant K.
      {
        const double w22 = safe_sqrt(d_v_sq.mean() + d_dh.mean() + d_hs.mean());
        cell.bound_k = (w22 + cell.norms.pn_dainf) / std::max(1e-300, cell.norm_phi);
        Eigen::VectorXd margins = Eigen::VectorXd::Zero(kBatches);
        CriterionResult finite;
        finite.id = "e_total_finite";
        finite.kind = "inequality";
        finite.lhs = cell.bound_k;
        finite.rhs = 0.0;
        finite.margin = 0.0;
        finite.error_bar = 0.0;
        finite.status = std::isfinite(cell.bound_k) ? "pass" : "fail";
        cell.criteria.push_back(finite);
      }

      cell.status = worst_status(cell.criteria);
      report.cells.push_back(std::move(cell));
    }
  }

  // (e) stability of K across the ladder, per ε level: within ±20% of the mean.
  for (std::size_t ei = 0; ei < eps.size(); ++ei) {
    std::vector<double> ks;
    for (const auto& cell : report.cells) {
      if (cell.epsilon == eps[ei]) ks.push_back(cell.bound_k);
    }
    if (ks.size() < 2) continue;
    double mean = 0.0;
    for (double k : ks) mean += k;
    mean /= static_cast<double>(ks.size());
    double spread = 0.0;
    for (double k : ks) spread = std::max(spread, std::abs(k - mean));
    CriterionResult stab;
    stab.id = "e_k_stable_eps" + std::to_string(ei);
    stab.kind = "inequality";
    stab.lhs = spread;
    stab.rhs = 0.2 * mean;
    stab.margin = stab.rhs - stab.lhs;
    stab.error_bar = 0.0;
    stab.status = stab.margin >= 0.0 ? "pass" : "fail";
    report.ladder_criteria.push_back(stab);
  }

  std::vector<CriterionResult> all = report.ladder_criteria;
  for (const auto& cell : report.cells) {
    all.insert(all.end(), cell.criteria.begin(), cell.criteria.end());
  }
  report.overall = worst_status(all);
  return report;
}

ConvergenceTable convergence_study(const SpectralModel& model, double lambda,
                                   const CylinderFunction& phi, const std::vector<int>& ladder,
                                   const QuadratureSpec& quad) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) {
      throw std::invalid_argument("convergence_study: ladder must be strictly increasing");
    }
  }
  ConvergenceTable table;
  if (ladder.size() < 2) return table;
  quad.validate();

  const CovariancePack pack = covariance_infinity(model);
  const int n_max = ladder.back();
  const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(model.dim), n_max);
  const int samples = std::max(kBatches * 2, (quad.mc_samples / kBatches) * kBatches);

  for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
    const int n_lo = ladder[k];
    const int n_hi = ladder[k + 1];
    MehlerKernel kernel_lo(build_pair(model, pack.q_inf, basis, n_lo, 0.0));
    MehlerKernel kernel_hi(build_pair(model, pack.q_inf, basis, n_hi, 0.0));
    const auto plan_lo = kernel_lo.plan(lambda, quad);
    const auto plan_hi = kernel_hi.plan(lambda, quad);

    NormalSampler sampler(mix_seed(quad.seed, 7777 + static_cast<std::uint64_t>(n_hi)));
    const Eigen::MatrixXd xis = sampler.matrix(samples, n_hi);
    double acc = 0.0;
    const Eigen::MatrixXd& q_hi = kernel_hi.pair().q_mat;
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd xi = xis.row(s).transpose();
      const SolvedPoint hi = kernel_hi.resolvent_solve(plan_hi, phi, xi, true, false);
      const SolvedPoint lo = kernel_lo.resolvent_solve(plan_lo, phi, xi.head(n_lo), true, false);
      Eigen::VectorXd dg = hi.gradient;
      dg.head(n_lo) -= lo.gradient;
      const double dv = hi.value - lo.value;
      acc += dv * dv + dg.dot(q_hi * dg);
    }
    table.rows.push_back({n_lo, n_hi, std::sqrt(acc / samples)});
  }
  return table;
}

double matrix_identity_check(int trials, int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("matrix_identity_check: dim must be >= 1");
  NormalSampler rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd m = symmetrize(rng.matrix(dim, dim));
    const Eigen::MatrixXd r = rng.matrix(dim, dim);
    const Eigen::MatrixXd skew = 0.5 * (r - r.transpose());
    const Eigen::MatrixXd h = 0.5 * (skew - m);  // H + Hᵀ = -M
    const Eigen::MatrixXd c = symmetrize(rng.matrix(dim, dim));
    const Eigen::MatrixXd k = h - h.transpose();
    const double lhs = 4.0 * (h * c * h * c).trace();
    const double t1 = (m * c * m * c).trace();
    const double t2 = (k * c * k * c).trace();
    const double scale = std::abs(lhs) + std::abs(t1) + std::abs(t2) + 1.0;
    worst = std::max(worst, std::abs(lhs - t1 - t2) / scale);
  }
  return worst;
}

nlohmann::ordered_json report_to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = report.schema;
  j["model_label"] = report.model_label;
  j["model_dim"] = report.model_dim;
  j["lambda"] = report.lambda;
  j["ladder"] = report.ladder;
  j["eps_grid"] = report.eps_grid;
  j["phi"] = report.phi;
  j["quad"] = report.quad.to_json();
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& cell : report.cells) {
    nlohmann::ordered_json jc;
    jc["n"] = cell.n;
    jc["epsilon"] = cell.epsilon;
    jc["nu"] = cell.nu;
    jc["nu_pencil_ok"] = cell.nu_pencil_ok;
    jc["dissipation_residual"] = cell.dissipation_residual;
    jc["norm_phi"] = cell.norm_phi;
    jc["norm_v"] = cell.norms.l2;
    jc["norm_dh"] = cell.norms.dh;
    jc["norm_dh2_hs"] = cell.norms.dh2_hs;
    jc["norm_pn_dainf"] = cell.norms.pn_dainf;
    jc["energy_residual"] = cell.energy_residual;
    jc["weak_residuals"] = cell.weak_residuals;
    jc["bound_k"] = cell.bound_k;
    nlohmann::ordered_json jcrit = nlohmann::ordered_json::array();
    for (const auto& c : cell.criteria) jcrit.push_back(criterion_to_json(c));
    jc["criteria"] = std::move(jcrit);
    jc["status"] = cell.status;
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  nlohmann::ordered_json jlad = nlohmann::ordered_json::array();
  for (const auto& c : report.ladder_criteria) jlad.push_back(criterion_to_json(c));
  j["ladder_criteria"] = std::move(jlad);
  j["overall"] = report.overall;
  return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport report;
  report.schema = j.at("schema").get<std::string>();
  if (report.schema != "ou-report/1") {
    throw std::runtime_error("report_from_json: unknown schema " + report.schema);
  }
  report.model_label = j.at("model_label").get<std::string>();
  report.model_dim = j.at("model_dim").get<int>();
  report.lambda = j.at("lambda").get<double>();
  report.ladder = j.at("ladder").get<std::vector<int>>();
  report.eps_grid = j.at("eps_grid").get<std::vector<double>>();
  report.phi = j.at("phi");
  report.quad = QuadratureSpec::from_json(j.at("quad"));
  for (const auto& jc : j.at("cells")) {
    CellReport cell;
    cell.n = jc.at("n").get<int>();
    cell.epsilon = jc.at("epsilon").get<double>();
    cell.nu = jc.at("nu").get<double>();
    cell.nu_pencil_ok = jc.at("nu_pencil_ok").get<bool>();
    cell.dissipation_residual = jc.at("dissipation_residual").get<double>();
    cell.norm_phi = jc.at("norm_phi").get<double>();
    cell.norms.l2 = jc.at("norm_v").get<double>();
    cell.norms.dh = jc.at("norm_dh").get<double>();
    cell.norms.dh2_hs = jc.at("norm_dh2_hs").get<double>();
    cell.norms.pn_dainf = jc.at("norm_pn_dainf").get<double>();
    cell.energy_residual = jc.at("energy_residual").get<double>();
    cell.weak_residuals = jc.at("weak_residuals").get<std::vector<double>>();
    cell.bound_k = jc.at("bound_k").get<double>();
    for (const auto& jcrit : jc.at("criteria")) cell.criteria.push_back(criterion_from_json(jcrit));
    cell.status = jc.at("status").get<std::string>();
    report.cells.push_back(std::move(cell));
  }
  for (const auto& jcrit : j.at("ladder_criteria")) {
    report.ladder_criteria.push_back(criterion_from_json(jcrit));
  }
  report.overall = j.at("overall").get<std::string>();
  return report;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "n_lo,n_hi,w12_diff\n";
  os.precision(17);
  for (const auto& row : table.rows) {
    os << row.n_lo << "," << row.n_hi << "," << row.w12_diff << "\n";
  }
  return os.str();
}

int report_exit_code(const VerificationReport& report) {
  if (report.overall == "pass") return 0;
  if (report.overall == "fail") return 2;
  return 3;
}

}  // namespace oulab
