#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "oulab/example7.hpp"
#include "oulab/quadrature.hpp"
#include "oulab/verify.hpp"

using namespace oulab;

namespace {

SpectralModel scalar_model() {
  Eigen::MatrixXd a(1, 1), q(1, 1);
  a << -1.0;
  q << 1.0;
  return make_model(1, a, q, "scalar");
}

QuadratureSpec small_quad(std::uint64_t seed = 7) {
  QuadratureSpec quad;
  quad.seed = seed;
  quad.mc_samples = 256;
  return quad;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("constant data solves exactly and passes every criterion") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CylinderFunction one = CylinderFunction::constant(1.0);
    const double lambda = 2.0;
    const VerificationReport report =
        solve_and_verify(preset.model, lambda, one, {2, 3}, {0.0}, small_quad());
    CHECK(report.overall == "pass");
    for (const auto& cell : report.cells) {
      CHECK(cell.norms.l2 == doctest::Approx(1.0 / lambda).epsilon(1e-9));
      CHECK(cell.norms.dh <= 1e-9);
      CHECK(cell.norms.dh2_hs <= 1e-9);
      CHECK(cell.norms.pn_dainf <= 1e-9);
      CHECK(std::abs(cell.energy_residual) <= 1e-9);
      CHECK(cell.status == "pass");
    }
  }

  TEST_CASE("scalar cosine run matches the closed-form solution norm") {
    const SpectralModel m = scalar_model();
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::VectorXd::Constant(1, 1.0), 0.0);
    QuadratureSpec quad = small_quad(11);
    quad.mc_samples = 2048;
    const VerificationReport report = solve_and_verify(m, 1.0, phi, {1}, {0.0}, quad);
    REQUIRE(report.cells.size() == 1);
    const CellReport& cell = report.cells[0];
    CHECK(cell.nu <= 1e-12);  // skew part vanishes in one dimension
    CHECK(cell.status == "pass");

    // Oracle: ‖V‖² = E[V(ξ)²] with V from the closed-form Mehler integral,
    // integrated by Gauss-Hermite.
    const GaussRule gh = gauss_hermite(48);
    double l2 = 0.0;
    for (int i = 0; i < 48; ++i) {
      const double xi = gh.nodes(i);
      const double v = oracles::laplace_transform(
          [&](double t) { return oracles::mehler_1d_cos(t, 1.0, xi); }, 1.0);
      l2 += gh.weights(i) * v * v;
    }
    CHECK(cell.norms.l2 == doctest::Approx(std::sqrt(l2)).epsilon(0.05));
  }

  TEST_CASE("preset ladder run passes all criteria with the pencil nu") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 5);
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.7), 0.3);
    const VerificationReport report =
        solve_and_verify(preset.model, 1.0, phi, {2, 3, 4}, {0.0}, small_quad(42));
    CHECK(report.overall == "pass");
    for (const auto& cell : report.cells) {
      CHECK(cell.nu <= 0.2 + 1e-9);
      CHECK(cell.dissipation_residual <= 1e-10);
      CHECK(cell.status == "pass");
    }
    // K is recorded and stable across the ladder.
    REQUIRE(report.ladder_criteria.size() == 1);
    CHECK(report.ladder_criteria[0].status == "pass");
  }

  TEST_CASE("a-priori bound scales with lambda") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.5), 0.0);
    const QuadratureSpec quad = small_quad(5);
    const VerificationReport r1 = solve_and_verify(preset.model, 1.0, phi, {3}, {0.0}, quad);
    const VerificationReport r2 = solve_and_verify(preset.model, 2.0, phi, {3}, {0.0}, quad);
    const double phinorm = r1.cells[0].norm_phi;
    CHECK(r2.cells[0].norms.l2 <= 0.5 * phinorm / 1.0 + 1e-9);
    CHECK(r2.cells[0].norms.l2 <= r1.cells[0].norms.l2 + 1e-9);
  }

  TEST_CASE("degenerate model requires a positive epsilon") {
    Eigen::VectorXd d(3);
    d << 1.0, 1.0, 0.0;
    Eigen::MatrixXd a(3, 3);
    a << -1.0, 0.5, 0.0, -0.5, -1.0, 0.5, 0.0, -0.5, -1.0;
    const SpectralModel m = make_model(3, a, Eigen::MatrixXd(d.asDiagonal()));
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.3), 0.0);
    CHECK_THROWS_WITH(solve_and_verify(m, 1.0, phi, {3}, {0.0}, small_quad()),
                      doctest::Contains("regularization required"));
    const VerificationReport report =
        solve_and_verify(m, 1.0, phi, {3}, {0.1, 0.01}, small_quad(42));
    CHECK(report.overall == "pass");
  }

  TEST_CASE("report serialization round-trips identically") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(0.8, -0.4), 0.1);
    const VerificationReport report =
        solve_and_verify(preset.model, 1.5, phi, {2, 3}, {0.0, 0.05}, small_quad(17));
    const std::string dump1 = report_to_json(report).dump(2);
    const VerificationReport parsed = report_from_json(nlohmann::json::parse(dump1));
    const std::string dump2 = report_to_json(parsed).dump(2);
    CHECK(dump1 == dump2);
    // Margins are consistent with the recorded status.
    for (const auto& cell : report.cells) {
      for (const auto& c : cell.criteria) {
        if (c.status == "pass") CHECK(c.margin >= -(2.0 * c.error_bar + 1e-6));
        if (c.status == "fail") CHECK(c.margin < 0.0);
      }
    }
  }

  TEST_CASE("exit codes map pass, fail, inconclusive") {
    VerificationReport r;
    r.overall = "pass";
    CHECK(report_exit_code(r) == 0);
    r.overall = "fail";
    CHECK(report_exit_code(r) == 2);
    r.overall = "inconclusive";
    CHECK(report_exit_code(r) == 3);
  }

  TEST_CASE("identical seeds give byte-identical reports") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.5), 0.2);
    const auto run = [&] {
      return report_to_json(
                 solve_and_verify(preset.model, 1.0, phi, {2, 3}, {0.0}, small_quad(123)))
          .dump(2);
    };
    CHECK(run() == run());
    const auto other = report_to_json(solve_and_verify(preset.model, 1.0, phi, {2, 3}, {0.0},
                                                       small_quad(124)))
                           .dump(2);
    CHECK(run() != other);
  }
}

TEST_SUITE("convergence") {
  TEST_CASE("degenerate ladder yields an empty table") {
    const SpectralModel m = scalar_model();
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::VectorXd::Constant(1, 1.0), 0.0);
    const ConvergenceTable table = convergence_study(m, 1.0, phi, {1}, small_quad());
    CHECK(table.rows.empty());
  }

  TEST_CASE("block-diagonal decoupling makes successive differences vanish") {
    // The preset decouples beyond the leading block, so V_n is n-independent.
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 5);
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.6), 0.0);
    const ConvergenceTable table =
        convergence_study(preset.model, 1.0, phi, {2, 3, 4, 5}, small_quad(29));
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) {
      CHECK(row.w12_diff <= 1e-8);
    }
    const std::string csv = convergence_csv(table);
    CHECK(csv.rfind("n_lo,n_hi,w12_diff\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("coupled drift gives a decreasing, convergent ladder") {
    // Tridiagonal skew coupling spreads phi's influence over every mode.
    const int dim = 6;
    Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) {
      a(i, i + 1) += 0.8;
      a(i + 1, i) -= 0.8;
    }
    const SpectralModel m = make_model(dim, a, Eigen::MatrixXd::Identity(dim, dim));
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::Vector2d(1.0, 0.4), 0.0);
    QuadratureSpec quad = small_quad(83);
    const ConvergenceTable table = convergence_study(m, 1.0, phi, {2, 4, 6}, quad);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].w12_diff <= table.rows[0].w12_diff + 5e-3);
  }

  TEST_CASE("non-increasing ladder is rejected") {
    const SpectralModel m = scalar_model();
    const CylinderFunction phi = CylinderFunction::cosine(Eigen::VectorXd::Constant(1, 1.0), 0.0);
    CHECK_THROWS_WITH(convergence_study(m, 1.0, phi, {1, 1}, small_quad()),
                      doctest::Contains("strictly increasing"));
  }
}

TEST_SUITE("matrix_identity") {
  TEST_CASE("symmetric special case is exact") {
    // H = -M/2 makes both sides Tr[MCMC].
    NormalSampler rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 1 + trial % 5;
      const Eigen::MatrixXd m = 0.5 * (rng.matrix(dim, dim) + rng.matrix(dim, dim).transpose());
      const Eigen::MatrixXd msym = 0.5 * (m + m.transpose());
      const Eigen::MatrixXd h = -0.5 * msym;
      const Eigen::MatrixXd c = 0.5 * (rng.matrix(dim, dim) + rng.matrix(dim, dim).transpose());
      const Eigen::MatrixXd csym = 0.5 * (c + c.transpose());
      const double lhs = 4.0 * (h * csym * h * csym).trace();
      const double rhs = (msym * csym * msym * csym).trace();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  TEST_CASE("scalar case reduces to 4h^2 = m^2") {
    CHECK(matrix_identity_check(50, 1, 5) <= 1e-12);
  }

  TEST_CASE("random trials at moderate dimension") {
    CHECK(matrix_identity_check(100, 8, 99) <= 1e-10);
  }
}
