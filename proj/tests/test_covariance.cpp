#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "oulab/covariance.hpp"
#include "oulab/example7.hpp"
#include "oulab/linalg.hpp"
#include "oulab/quadrature.hpp"

using namespace oulab;

namespace {

SpectralModel scalar_model() {
  Eigen::MatrixXd a(1, 1), q(1, 1);
  a << -1.0;
  q << 1.0;
  return make_model(1, a, q, "scalar");
}

// Normal drift with spectrum drawn from [-2, -0.5]: a rotation of a diagonal.
SpectralModel random_stable_model(int n, std::uint64_t seed) {
  NormalSampler rng(seed);
  const Eigen::MatrixXd g = rng.matrix(n, n);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd u = qr.householderQ();
  Eigen::VectorXd eigs(n);
  for (int i = 0; i < n; ++i) {
    eigs(i) = -0.5 - 1.5 * std::abs(std::sin(1.7 * (i + 1) + 0.3 * static_cast<double>(seed % 13)));
  }
  const Eigen::MatrixXd a = u * eigs.asDiagonal() * u.transpose();
  return make_model(n, a, Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

TEST_SUITE("covariance") {
  TEST_CASE("scalar finite-time covariance matches the closed form") {
    // ∫₀¹ e^{-2s} ds = (1 - e^{-2})/2 = 0.4323323583816936...
    const SpectralModel m = scalar_model();
    const Eigen::MatrixXd qt = covariance_finite(m, 1.0, 4);
    CHECK(qt(0, 0) == doctest::Approx(0.4323323583816936).epsilon(1e-13));
  }

  TEST_CASE("scalar stationary covariance is one half") {
    const CovariancePack pack = covariance_infinity(scalar_model());
    CHECK(pack.q_inf(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pack.lyap_residual <= 1e-15);
  }

  TEST_CASE("preset stationary covariance has the closed-form block and tail") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    CHECK(pack.q_inf(0, 1) == doctest::Approx(0.5 / (5.0 * pi2)).epsilon(1e-12));
    CHECK(pack.q_inf(0, 0) == doctest::Approx(1.0 / (2.0 * pi2)).epsilon(1e-12));
    CHECK(pack.q_inf(1, 1) == doctest::Approx(1.0 / (8.0 * pi2)).epsilon(1e-12));
    // Tail entry i (1-based): ∫₀^∞ e^{-2 i² π² s} ds = 1/(2 i² π²), pinned by
    // an independent adaptive quadrature of the integrand.
    for (int i = 3; i <= 6; ++i) {
      const double expected = 1.0 / (2.0 * i * i * pi2);
      CHECK(pack.q_inf(i - 1, i - 1) == doctest::Approx(expected).epsilon(1e-12));
      const double oracle =
          oracles::laplace_transform([](double) { return 1.0; }, 2.0 * i * i * pi2);
      CHECK(pack.q_inf(i - 1, i - 1) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK((pack.q_inf - preset.q_inf_closed).norm() <= 1e-12);
  }

  TEST_CASE("quadrature at large time matches the sylvester route") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const SpectralModel m = random_stable_model(4, seed);
      const CovariancePack pack = covariance_infinity(m);
      const Eigen::MatrixXd qt = covariance_finite(m, 50.0, 50);
      CHECK((qt - pack.q_inf).norm() <= 1e-8);
    }
  }

  TEST_CASE("lyapunov residual detects a perturbed solution") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    CHECK(lyapunov_residual(preset.model, pack.q_inf) < 1e-12);
    Eigen::MatrixXd bad = pack.q_inf;
    bad(0, 0) += 0.1;
    // Residual matrix is 0.1(E₁₁Aᵀ + AE₁₁) = 0.2·a₁·E₁₁ with a₁ = -π².
    CHECK(lyapunov_residual(preset.model, bad) == doctest::Approx(0.2 * pi2).epsilon(1e-12));
  }

  TEST_CASE("finite-time covariance converges at the spectral rate") {
    // Panels sized so the stiffest mode e^{2a_NN s} is resolved; the bound
    // itself underflows past t ≈ 3, so a roundoff floor is added.
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CovariancePack pack = covariance_infinity(preset.model);
    const double alpha = spectral_abscissa(preset.model.drift);
    for (double t : {1.0, 5.0, 20.0}) {
      const Eigen::MatrixXd qt = covariance_finite(preset.model, t, 40 * static_cast<int>(t));
      const double bound = pack.q_inf.norm() * std::exp(2.0 * t * alpha);
      CHECK((qt - pack.q_inf).norm() <= bound + 1e-12);
    }
  }

  TEST_CASE("covariance increments are positive semidefinite") {
    const SpectralModel m = random_stable_model(5, 9);
    Eigen::MatrixXd prev = covariance_finite(m, 0.5, 4);
    for (double t : {1.0, 2.0, 4.0}) {
      const Eigen::MatrixXd cur = covariance_finite(m, t, 8);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cur - prev);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      prev = cur;
    }
  }

  TEST_CASE("non-hurwitz drift is refused") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;  // purely imaginary spectrum
    const SpectralModel m = make_model(2, a, Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_WITH(covariance_infinity(m), doctest::Contains("drift not Hurwitz"));
  }
}
