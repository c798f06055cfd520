#include "oulab/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "oulab/basis.hpp"
#include "oulab/covariance.hpp"
#include "oulab/example7.hpp"
#include "oulab/galerkin.hpp"
#include "oulab/model.hpp"
#include "oulab/verify.hpp"

namespace oulab::cli {

namespace {

struct Options {
  std::string model_path;
  std::string example7;  // "q1,q2,q3,N"
  double lambda = 1.0;
  std::string ladder = "2,3,4";
  std::string eps = "0";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string phi;   // inline profile JSON
  std::string quad;  // inline JSON or path
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

SpectralModel resolve_model(const Options& opt) {
  const bool has_model = !opt.model_path.empty();
  const bool has_preset = !opt.example7.empty();
  if (has_model == has_preset) {
    throw std::invalid_argument("exactly one of --model and --example7 is required");
  }
  if (has_model) return load_model(opt.model_path);
  const std::vector<double> v = parse_list(opt.example7);
  if (v.size() != 4) throw std::invalid_argument("--example7 expects q1,q2,q3,N");
  return build_example(v[0], v[1], v[2], static_cast<int>(v[3])).model;
}

QuadratureSpec resolve_quad(const Options& opt) {
  QuadratureSpec spec;
  if (!opt.quad.empty()) {
    nlohmann::json j;
    if (!opt.quad.empty() && opt.quad.front() == '{') {
      j = nlohmann::json::parse(opt.quad);
    } else {
      std::ifstream in(opt.quad);
      if (!in) throw std::runtime_error("cannot open quadrature spec: " + opt.quad);
      in >> j;
    }
    spec = QuadratureSpec::from_json(j);
  }
  if (opt.seed) spec.seed = *opt.seed;
  return spec;
}

CylinderFunction resolve_phi(const Options& opt, int dim) {
  if (!opt.phi.empty()) return CylinderFunction::from_json(nlohmann::json::parse(opt.phi));
  Eigen::VectorXd a = Eigen::VectorXd::Zero(std::min(2, dim));
  a(0) = 1.0;
  if (a.size() > 1) a(1) = 0.5;
  return CylinderFunction::cosine(std::move(a), 0.0);
}

std::vector<int> resolve_ladder(const Options& opt, int dim) {
  std::vector<int> ladder;
  for (double v : parse_list(opt.ladder)) ladder.push_back(static_cast<int>(v));
  if (ladder.empty()) throw std::invalid_argument("--ladder must not be empty");
  for (int n : ladder) {
    if (n < 1 || n > dim) throw std::invalid_argument("--ladder entries must be in [1, dim]");
  }
  return ladder;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
}

void require_seed(const Options& opt) {
  if (!opt.seed) throw std::invalid_argument("seed required: pass --seed for sampling commands");
}

int cmd_check(const Options& opt) {
  const SpectralModel model = resolve_model(opt);
  const std::vector<int> ladder = resolve_ladder(opt, model.dim);
  std::vector<double> eps = parse_list(opt.eps);
  if (eps.empty()) eps.push_back(0.0);

  const DegeneracyFlag deg = degeneracy(model);
  if (!deg.nondegenerate &&
      std::none_of(eps.begin(), eps.end(), [](double e) { return e > 0.0; })) {
    std::cerr << "regularization required: degenerate Q needs a positive epsilon in --eps\n";
    return 2;
  }

  const CovariancePack pack = covariance_infinity(model);
  const int n_max = *std::max_element(ladder.begin(), ladder.end());
  const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(model.dim), n_max);

  nlohmann::ordered_json j;
  j["schema"] = "ou-check/1";
  j["model_label"] = model.label;
  j["dim"] = model.dim;
  j["nondegenerate"] = deg.nondegenerate;
  j["q_rank"] = deg.rank;
  j["lyapunov_residual"] = pack.lyap_residual;
  const double lyap_tol =
      1e-10 * (model.diffusion.norm() + model.drift.norm() * pack.q_inf.norm());
  bool ok = pack.lyap_residual <= lyap_tol;

  std::string c_error;
  double c_rkhs = 0.0;
  try {
    c_rkhs = rkhs_constant(model, pack.q_inf);
    j["c_rkhs"] = c_rkhs;
  } catch (const std::exception& e) {
    c_error = e.what();
    j["c_rkhs"] = nullptr;
    j["c_rkhs_error"] = c_error;
    ok = false;
  }

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (double epsilon : eps) {
    for (int n : ladder) {
      const GalerkinPair pair = build_pair(model, pack.q_inf, basis, n, epsilon);
      nlohmann::ordered_json jc;
      jc["n"] = n;
      jc["epsilon"] = epsilon;
      const double diss = check_dissipation(pair);
      jc["dissipation_residual"] = diss;
      if (diss > 1e-10 * std::max(1.0, pair.q_mat.norm())) ok = false;
      try {
        const double nu = nu_min(pair);
        jc["nu_min"] = nu;
        jc["nu_ok"] = nu < 1.0;
        if (nu >= 1.0) ok = false;
      } catch (const std::exception& e) {
        jc["nu_min"] = nullptr;
        jc["nu_error"] = e.what();
        if (epsilon > 0.0 || deg.nondegenerate) ok = false;
      }
      cells.push_back(std::move(jc));
    }
  }
  j["cells"] = std::move(cells);
  j["overall"] = ok ? "pass" : "fail";
  write_text(opt.out, j.dump(2) + "\n");
  return ok ? 0 : 2;
}

int cmd_verify(const Options& opt) {
  require_seed(opt);
  const SpectralModel model = resolve_model(opt);
  const QuadratureSpec quad = resolve_quad(opt);
  const CylinderFunction phi = resolve_phi(opt, model.dim);
  const std::vector<int> ladder = resolve_ladder(opt, model.dim);
  std::vector<double> eps = parse_list(opt.eps);

  const VerificationReport report =
      solve_and_verify(model, opt.lambda, phi, ladder, eps, quad);
  write_text(opt.out, report_to_json(report).dump(2) + "\n");
  return report_exit_code(report);
}

int cmd_converge(const Options& opt) {
  require_seed(opt);
  const SpectralModel model = resolve_model(opt);
  const QuadratureSpec quad = resolve_quad(opt);
  const CylinderFunction phi = resolve_phi(opt, model.dim);
  const std::vector<int> ladder = resolve_ladder(opt, model.dim);

  const ConvergenceTable table = convergence_study(model, opt.lambda, phi, ladder, quad);
  write_text(opt.out, convergence_csv(table));
  return 0;
}

int cmd_solve(const Options& opt) {
  require_seed(opt);
  const SpectralModel model = resolve_model(opt);
  const QuadratureSpec quad = resolve_quad(opt);
  const CylinderFunction phi = resolve_phi(opt, model.dim);
  const std::vector<int> ladder = resolve_ladder(opt, model.dim);
  const int n = ladder.front();
  std::vector<double> eps = parse_list(opt.eps);
  const double epsilon = eps.empty() ? 0.0 : eps.front();

  const CovariancePack pack = covariance_infinity(model);
  const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(model.dim), n);
  MehlerKernel kernel(build_pair(model, pack.q_inf, basis, n, epsilon));
  const auto plan = kernel.plan(opt.lambda, quad);

  NormalSampler sampler(quad.seed);
  const int samples = quad.mc_samples;
  std::vector<SolvedPoint> solved(samples);
  for (int s = 0; s < samples; ++s) {
    solved[s] = kernel.resolvent_solve(plan, phi, sampler.vector(n), true, true);
  }
  const NormSet ns = norms(solved, kernel.pair());
  nlohmann::ordered_json j;
  j["schema"] = "ou-solve/1";
  j["model_label"] = model.label;
  j["n"] = n;
  j["epsilon"] = epsilon;
  j["lambda"] = opt.lambda;
  j["phi"] = phi.to_json();
  j["quad"] = quad.to_json();
  j["norm_v"] = ns.l2;
  j["norm_dh"] = ns.dh;
  j["norm_dh2_hs"] = ns.dh2_hs;
  j["norm_pn_dainf"] = ns.pn_dainf;
  j["pde_residual"] = pde_residual(kernel.pair(), opt.lambda, phi, solved);
  write_text(opt.out, j.dump(2) + "\n");
  return 0;
}

int cmd_example7(const Options& opt) {
  if (opt.example7.empty()) throw std::invalid_argument("example7 command requires --example7");
  const std::vector<double> v = parse_list(opt.example7);
  if (v.size() != 4) throw std::invalid_argument("--example7 expects q1,q2,q3,N");
  const ExamplePreset preset = build_example(v[0], v[1], v[2], static_cast<int>(v[3]));
  nlohmann::ordered_json j = model_to_json(preset.model);
  write_text(opt.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Truncated non-symmetric Ornstein-Uhlenbeck laboratory"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", opt.model_path, "model config JSON path");
    cmd->add_option("--example7", opt.example7, "preset shorthand q1,q2,q3,N");
    cmd->add_option("--lambda", opt.lambda, "spectral parameter (> 0)");
    cmd->add_option("--ladder", opt.ladder, "comma-separated frame widths");
    cmd->add_option("--eps", opt.eps, "comma-separated regularization grid");
    cmd->add_option("--seed", opt.seed, "RNG seed (required for sampling commands)");
    cmd->add_option("--out", opt.out, "output path (stdout when omitted)");
    cmd->add_option("--phi", opt.phi, "inline profile JSON, e.g. {\"cosine\":{\"a\":[1],\"b\":0}}");
    cmd->add_option("--quad", opt.quad, "quadrature spec: inline JSON or path");
  };

  CLI::App* check = app.add_subcommand("check", "hypothesis checks (Lyapunov, c, nu, dissipation)");
  CLI::App* solve = app.add_subcommand("solve", "solve one resolvent problem and report norms");
  CLI::App* verify = app.add_subcommand("verify", "full estimate suite over a (n, eps) grid");
  CLI::App* converge = app.add_subcommand("converge", "frame-ladder convergence table (CSV)");
  CLI::App* example7 = app.add_subcommand("example7", "expand the preset into a model config");
  for (CLI::App* cmd : {check, solve, verify, converge, example7}) add_common(cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (check->parsed()) return cmd_check(opt);
    if (solve->parsed()) return cmd_solve(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (converge->parsed()) return cmd_converge(opt);
    if (example7->parsed()) return cmd_example7(opt);
    std::cerr << "no command given\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ModelError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

}  // namespace oulab::cli
