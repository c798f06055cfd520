#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "oulab/basis.hpp"
#include "oulab/covariance.hpp"
#include "oulab/example7.hpp"
#include "oulab/galerkin.hpp"
#include "oulab/linalg.hpp"
#include "oulab/quadrature.hpp"

using namespace oulab;

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
}

TEST_SUITE("example7") {
  TEST_CASE("closed forms for q = (1, 1/2, 1)") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    CHECK(preset.q_inf_closed(0, 1) == doctest::Approx(1.0 / (10.0 * kPi2)).epsilon(1e-14));
    CHECK(preset.b_closed(0, 1) == doctest::Approx(-2.0 / 5.0).epsilon(1e-14));
    // Tail at i = 3: 1/(18π²), confirmed by independent quadrature of the
    // covariance integrand.
    CHECK(preset.q_inf_closed(2, 2) == doctest::Approx(1.0 / (18.0 * kPi2)).epsilon(1e-14));
    const double oracle =
        oracles::laplace_transform([](double) { return 1.0; }, 2.0 * 9.0 * kPi2);
    CHECK(preset.q_inf_closed(2, 2) == doctest::Approx(oracle).epsilon(1e-9));
  }

  TEST_CASE("closed forms agree with the sylvester route") {
    const ExamplePreset preset = build_example(1.3, 0.4, 0.9, 8);
    const CovariancePack pack = covariance_infinity(preset.model);
    CHECK((pack.q_inf - preset.q_inf_closed).norm() <= 1e-12);
    // Raw-frame galerkin b-matrix is exactly the closed-form B.
    const ThetaBasis raw = ThetaBasis::from_frame(Eigen::MatrixXd::Identity(8, 8), pack.q_inf);
    const GalerkinPair pair = build_pair(preset.model, pack.q_inf, raw, 8, 0.0);
    CHECK((pair.b_mat - preset.b_closed).norm() <= 1e-12);
  }

  TEST_CASE("printed tail variant is kept behind the flag") {
    const ExamplePreset printed = build_example(1.0, 0.5, 1.0, 5, /*printed_tail=*/true);
    CHECK(printed.q_inf_closed(3, 3) == doctest::Approx(1.0 / (16.0 * kPi2)).epsilon(1e-14));
    CHECK(printed.b_closed(3, 3) == -1.0);
    // The printed values violate the Lyapunov identity; the default ones do not.
    CHECK(lyapunov_residual(printed.model, printed.q_inf_closed) > 1e-3);
    const ExamplePreset consistent = build_example(1.0, 0.5, 1.0, 5);
    CHECK(lyapunov_residual(consistent.model, consistent.q_inf_closed) <= 1e-12);
  }

  TEST_CASE("determinant condition is enforced") {
    CHECK_THROWS_WITH(build_example(1.0, 1.0, 1.0, 4), doctest::Contains("q1q3 - q2^2"));
  }

  TEST_CASE("admissibility arithmetic") {
    // (9/25)·(1/4)(1 + 1/4)/(3/4)² = 1/5.
    const AdmissibilityResult adm = admissibility(1.0, 0.5, 1.0);
    CHECK(adm.admissible);
    CHECK(adm.lhs == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(adm.sufficient_cond);  // 3/4 ≤ 1

    const AdmissibilityResult tiny = admissibility(1.0, 1e-6, 1.0);
    CHECK(tiny.admissible);
    CHECK(tiny.lhs <= 1e-11);

    const AdmissibilityResult bad = admissibility(1.0, 0.99, 1.0);
    CHECK_FALSE(bad.admissible);
    CHECK(bad.lhs > 1.0);
  }

  TEST_CASE("nu formula and its domination of the pencil value") {
    CHECK(nu_formula(1.0, 0.5, 1.0) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(nu_formula(1.0, 1e-5, 1.0) <= 1e-8);

    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 8);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis raw = ThetaBasis::from_frame(Eigen::MatrixXd::Identity(8, 8), pack.q_inf);
    for (int m = 2; m <= 8; ++m) {
      const GalerkinPair pair = build_pair(preset.model, pack.q_inf, raw, m, 0.0);
      CHECK(nu_min(pair) <= preset.nu + 1e-9);
    }
  }

  TEST_CASE("skew part matches the displayed matrix and trace form") {
    const double q2 = 0.5;
    const ExamplePreset preset = build_example(1.0, q2, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis raw = ThetaBasis::from_frame(Eigen::MatrixXd::Identity(6, 6), pack.q_inf);
    const GalerkinPair pair = build_pair(preset.model, pack.q_inf, raw, 6, 0.0);
    const Eigen::MatrixXd k = pair.b_mat - pair.b_mat.transpose();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
    expected(0, 1) = -3.0 * q2 / 5.0;
    expected(1, 0) = 3.0 * q2 / 5.0;
    CHECK((k - expected).norm() <= 1e-13);

    NormalSampler rng(111);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd c = symmetrize(rng.matrix(6, 6));
      const double lhs = (k * c * k * c).trace();
      const double rhs = (18.0 * q2 * q2 / 25.0) * (c(0, 1) * c(0, 1) - c(0, 0) * c(1, 1));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}
