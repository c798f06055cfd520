#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "oulab/example7.hpp"
#include "oulab/linalg.hpp"
#include "oulab/model.hpp"
#include "oulab/quadrature.hpp"

using namespace oulab;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("scalar contraction model loads") {
    const auto path = write_temp("oulab_scalar.json",
                                 R"({"dim":1,"drift":{"dense":[[-1]]},"diffusion":{"dense":[[1]]},"label":"scalar"})");
    const SpectralModel m = load_model(path);
    CHECK(m.dim == 1);
    CHECK(m.drift(0, 0) == -1.0);
    CHECK(m.diffusion(0, 0) == 1.0);
    CHECK_FALSE(m.contraction_warning);
  }

  TEST_CASE("preset file with diagonal drift and block2 diffusion") {
    const auto path = write_temp(
        "oulab_preset.json",
        R"({"dim":6,"drift":{"diag":[-9.869604401089358,-39.47841760435743,-88.82643960980423,-157.91367041742973,-246.74011002723395,-355.3057584392169]},"diffusion":{"block2":{"q1":1.0,"q2":0.5,"q3":1.0,"tail":"identity"}},"label":"dirichlet"})");
    const SpectralModel m = load_model(path);
    CHECK(m.dim == 6);
    CHECK(m.drift(0, 0) == doctest::Approx(-std::numbers::pi * std::numbers::pi).epsilon(1e-12));
    CHECK(m.drift(0, 1) == 0.0);
    CHECK(m.diffusion(0, 1) == 0.5);
    CHECK(m.diffusion(3, 3) == 1.0);
    CHECK(m.diffusion(2, 3) == 0.0);
  }

  TEST_CASE("positive drift eigenvalue is rejected") {
    Eigen::MatrixXd a(1, 1), q(1, 1);
    a << 1.0;
    q << 1.0;
    CHECK_THROWS_WITH_AS(make_model(1, a, q), doctest::Contains("contraction check failed"),
                         ModelError);
  }

  TEST_CASE("asymmetric diffusion is rejected with the offending quantity") {
    Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd q(2, 2);
    q << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_WITH_AS(make_model(2, a, q), doctest::Contains("not symmetric"), ModelError);
  }

  TEST_CASE("indefinite diffusion is rejected") {
    Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd q(2, 2);
    q << 1.0, 0.0, 0.0, -0.5;
    CHECK_THROWS_WITH_AS(make_model(2, a, q), doctest::Contains("not PSD"), ModelError);
  }

  TEST_CASE("dimension mismatch is reported") {
    Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_WITH_AS(make_model(3, a, q), doctest::Contains("does not match dim"), ModelError);
  }

  TEST_CASE("hurwitz drift failing the log-norm check is accepted with warning") {
    Eigen::MatrixXd a(2, 2);
    a << -0.1, 2.0, -0.5, 0.0;
    REQUIRE(log_norm(a) > 0.0);
    REQUIRE(spectral_abscissa(a) < 0.0);
    const SpectralModel m = make_model(2, a, Eigen::MatrixXd::Identity(2, 2));
    CHECK(m.contraction_warning);
  }

  TEST_CASE("round-trip serialization is byte-identical") {
    const std::string text =
        R"({"dim":3,"drift":{"diag":[-1.0,-2.5,-4.0]},"diffusion":{"dense":[[2,0.25,0],[0.25,1,0],[0,0,1]]},"label":"roundtrip"})";
    const auto path = write_temp("oulab_rt.json", text);
    const SpectralModel m1 = load_model(path);
    const std::string dump1 = model_to_json(m1).dump(2);
    const auto path2 = write_temp("oulab_rt2.json", dump1);
    const SpectralModel m2 = load_model(path2);
    const std::string dump2 = model_to_json(m2).dump(2);
    CHECK(dump1 == dump2);
  }

  TEST_CASE("accepted models have contractive matrix exponentials") {
    std::vector<SpectralModel> models;
    models.push_back(make_model(1, -Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)));
    models.push_back(build_example(1.0, 0.5, 1.0, 6).model);
    NormalSampler rng(5);
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 3 + trial;
      Eigen::MatrixXd g = rng.matrix(n, n);
      Eigen::MatrixXd a = g - (log_norm(g) + 0.2) * Eigen::MatrixXd::Identity(n, n);
      models.push_back(make_model(n, a, Eigen::MatrixXd::Identity(n, n)));
    }
    for (const auto& m : models) {
      if (m.contraction_warning) continue;
      for (double t : {0.1, 1.0, 10.0}) {
        const Eigen::MatrixXd e = (t * m.drift).exp();
        const double norm2 = e.jacobiSvd().singularValues()(0);
        CHECK(norm2 <= 1.0 + 1e-8);
      }
    }
  }
}

TEST_SUITE("degeneracy") {
  TEST_CASE("identity is nondegenerate") {
    const SpectralModel m =
        make_model(3, -Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3));
    const DegeneracyFlag flag = degeneracy(m, 1e-12);
    CHECK(flag.nondegenerate);
    CHECK(flag.rank == 3);
  }

  TEST_CASE("rank-deficient diagonal is flagged") {
    Eigen::VectorXd d(3);
    d << 1.0, 1.0, 0.0;
    const SpectralModel m =
        make_model(3, -Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd(d.asDiagonal()));
    const DegeneracyFlag flag = degeneracy(m, 1e-12);
    CHECK_FALSE(flag.nondegenerate);
    CHECK(flag.rank == 2);
  }

  TEST_CASE("preset block with positive determinant is nondegenerate") {
    const SpectralModel m = build_example(1.0, 0.5, 1.0, 6).model;
    CHECK(degeneracy(m).nondegenerate);
  }
}
