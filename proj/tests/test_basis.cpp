#include <doctest.h>

#include <cmath>

#include "oulab/basis.hpp"
#include "oulab/covariance.hpp"
#include "oulab/example7.hpp"
#include "oulab/quadrature.hpp"

using namespace oulab;

TEST_SUITE("basis") {
  TEST_CASE("scalar normalization") {
    Eigen::MatrixXd q_inf(1, 1);
    q_inf << 0.5;
    const ThetaBasis basis = gram_schmidt_theta(q_inf, canonical_seeds(1), 1);
    CHECK(basis.frame(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(basis.images(0, 0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  }

  TEST_CASE("diagonal covariance keeps canonical directions") {
    Eigen::VectorXd d(4);
    d << 0.5, 2.0, 0.125, 1.0;
    const Eigen::MatrixXd q_inf = d.asDiagonal();
    const ThetaBasis basis = gram_schmidt_theta(q_inf, canonical_seeds(4), 3);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 4; ++i) {
        const double expected = (i == j) ? 1.0 / std::sqrt(d(i)) : 0.0;
        CHECK(basis.frame(i, j) == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("preset frame is orthonormal in the Q_inf inner product") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(6), 4);
    const Eigen::MatrixXd gram = basis.frame.transpose() * pack.q_inf * basis.frame;
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("dependent seeds are skipped via the cofinal rule") {
    Eigen::MatrixXd q_inf = Eigen::MatrixXd::Identity(3, 3);
    std::vector<Eigen::VectorXd> seeds;
    seeds.push_back(Eigen::Vector3d(1.0, 0.0, 0.0));
    seeds.push_back(Eigen::Vector3d(2.0, 0.0, 0.0));  // dependent, must be skipped
    seeds.push_back(Eigen::Vector3d(0.0, 1.0, 0.0));
    const ThetaBasis basis = gram_schmidt_theta(q_inf, seeds, 2);
    REQUIRE(basis.gram_log.size() == 3);
    CHECK(basis.gram_log[0].kept);
    CHECK_FALSE(basis.gram_log[1].kept);
    CHECK(basis.gram_log[2].kept);
  }

  TEST_CASE("insufficient span is an error") {
    Eigen::MatrixXd q_inf = Eigen::MatrixXd::Identity(2, 2);
    std::vector<Eigen::VectorXd> seeds;
    seeds.push_back(Eigen::Vector2d(1.0, 1.0));
    seeds.push_back(Eigen::Vector2d(2.0, 2.0));
    CHECK_THROWS_WITH(gram_schmidt_theta(q_inf, seeds, 2),
                      doctest::Contains("insufficient seed span"));
  }

  TEST_CASE("projection returns theta coordinates") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 5);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(5), 4);

    // The H∞-representative of e₁ is the first image column.
    const Eigen::VectorXd e1_rep = basis.images.col(0);
    const Eigen::VectorXd coords = project_theta(basis, e1_rep);
    CHECK(coords(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 1; j < 4; ++j) CHECK(coords(j) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(project_theta(basis, Eigen::VectorXd::Zero(5)).cwiseAbs().maxCoeff() == 0.0);

    // |Pₙx|²_{H∞} = Σ coords², forced by FᵀQ∞F = I.
    NormalSampler rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = rng.vector(5);
      const Eigen::VectorXd c = project_theta(basis, x);
      const Eigen::VectorXd rep = basis.images * c;  // H∞ representative of Pₙx
      // |rep|²_{H∞} = repᵀ Q∞⁻¹ rep with rep = Q∞ F c: equals cᵀFᵀQ∞Fc = |c|².
      const double hinf_sq = (basis.frame * c).dot(pack.q_inf * (basis.frame * c));
      CHECK(hinf_sq == doctest::Approx(c.squaredNorm()).epsilon(1e-10));
      CHECK(rep.size() == 5);
    }
  }

  TEST_CASE("pushforward covariance is the identity") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(6), 5);
    const Eigen::MatrixXd push = pushforward_covariance(basis, pack.q_inf);
    CHECK((push - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::MatrixXd scalar_qinf(1, 1);
    scalar_qinf << 0.5;
    const ThetaBasis scalar = gram_schmidt_theta(scalar_qinf, canonical_seeds(1), 1);
    CHECK(pushforward_covariance(scalar, scalar_qinf)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("unnormalized frame is detected by the pushforward") {
    // Negative control: a raw canonical frame pushes forward to Q∞ itself.
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 4);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis raw = ThetaBasis::from_frame(Eigen::MatrixXd::Identity(4, 4), pack.q_inf);
    const Eigen::MatrixXd push = pushforward_covariance(raw, pack.q_inf);
    CHECK((push - pack.q_inf).norm() <= 1e-14);
    CHECK((push - Eigen::MatrixXd::Identity(4, 4)).norm() > 0.5);
  }

  TEST_CASE("gram-schmidt is idempotent on its own output") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, canonical_seeds(6), 4);
    std::vector<Eigen::VectorXd> reseeds;
    for (int j = 0; j < 4; ++j) reseeds.push_back(basis.frame.col(j));
    const ThetaBasis again = gram_schmidt_theta(pack.q_inf, reseeds, 4);
    CHECK((again.frame - basis.frame).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("kept seeds are reproducible from the frame") {
    const ExamplePreset preset = build_example(1.0, 0.5, 1.0, 6);
    const CovariancePack pack = covariance_infinity(preset.model);
    const auto seeds = canonical_seeds(6);
    const ThetaBasis basis = gram_schmidt_theta(pack.q_inf, seeds, 6);
    for (const auto& step : basis.gram_log) {
      if (!step.kept) continue;
      const Eigen::VectorXd& s = seeds[step.seed_index];
      const Eigen::VectorXd coeff =
          basis.frame.colPivHouseholderQr().solve(s);
      CHECK((basis.frame * coeff - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
    }
  }
}
