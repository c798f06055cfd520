#include "oulab/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oulab/linalg.hpp"

namespace oulab {

namespace {

Eigen::MatrixXd parse_dense(const nlohmann::json& rows, int dim, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    throw ModelError(std::string(what) + ": expected " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ModelError(std::string(what) + ": row " + std::to_string(i) + " has wrong length");
    }
    for (int j = 0; j < dim; ++j) m(i, j) = row.at(j).get<double>();
  }
  return m;
}

nlohmann::ordered_json dense_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd expand_block2(const Block2Diffusion& b, int dim) {
  if (dim < 2) throw ModelError("block2 diffusion requires dim >= 2");
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim, dim);
  q(0, 0) = b.q1;
  q(0, 1) = b.q2;
  q(1, 0) = b.q2;
  q(1, 1) = b.q3;
  return q;
}

}  // namespace

SpectralModel make_model(int dim, Eigen::MatrixXd drift, Eigen::MatrixXd diffusion,
                         std::string label) {
  if (dim < 1) throw ModelError("dim must be a positive integer");
  if (drift.rows() != dim || drift.cols() != dim) {
    std::ostringstream os;
    os << "drift shape " << drift.rows() << "x" << drift.cols() << " does not match dim " << dim;
    throw ModelError(os.str());
  }
  if (diffusion.rows() != dim || diffusion.cols() != dim) {
    std::ostringstream os;
    os << "diffusion shape " << diffusion.rows() << "x" << diffusion.cols()
       << " does not match dim " << dim;
    throw ModelError(os.str());
  }

  const double asym = (diffusion - diffusion.transpose()).cwiseAbs().maxCoeff();
  const double qscale = std::max(1.0, diffusion.cwiseAbs().maxCoeff());
  if (asym > 1e-9 * qscale) {
    std::ostringstream os;
    os << "diffusion not symmetric: max|Q - Q^T| = " << asym;
    throw ModelError(os.str());
  }
  SpectralModel model;
  model.dim = dim;
  model.drift = std::move(drift);
  model.diffusion = symmetrize(diffusion);
  model.label = std::move(label);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.diffusion);
  const double min_eig = es.eigenvalues().minCoeff();
  const double norm_q = std::max(1e-300, model.diffusion.norm());
  if (min_eig < -1e-12 * norm_q) {
    std::ostringstream os;
    os << "diffusion not PSD: min eigenvalue " << min_eig << " < " << -1e-12 * norm_q;
    throw ModelError(os.str());
  }

  const double mu = log_norm(model.drift);
  if (mu > 1e-12 * std::max(1.0, model.drift.norm())) {
    // The log-norm check is only sufficient; Hurwitz drifts still admit Q∞.
    const double alpha = spectral_abscissa(model.drift);
    if (alpha < 0.0) {
      model.contraction_warning = true;
    } else {
      std::ostringstream os;
      os << "contraction check failed: log-norm " << mu << " > 0 and spectral abscissa "
         << alpha << " >= 0";
      throw ModelError(os.str());
    }
  }
  return model;
}

SpectralModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelError("model config must be a JSON object");
  if (!j.contains("dim")) throw ModelError("missing field 'dim'");
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw ModelError("dim must be a positive integer");

  std::optional<Eigen::VectorXd> drift_diag;
  Eigen::MatrixXd drift;
  if (!j.contains("drift")) throw ModelError("missing field 'drift'");
  const auto& jd = j.at("drift");
  if (jd.contains("diag")) {
    const auto& diag = jd.at("diag");
    if (static_cast<int>(diag.size()) != dim) throw ModelError("drift.diag: wrong length");
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = diag.at(i).get<double>();
    drift = d.asDiagonal();
    drift_diag = d;
  } else if (jd.contains("dense")) {
    drift = parse_dense(jd.at("dense"), dim, "drift.dense");
  } else {
    throw ModelError("drift must provide 'diag' or 'dense'");
  }

  std::optional<Block2Diffusion> block2;
  Eigen::MatrixXd diffusion;
  if (!j.contains("diffusion")) throw ModelError("missing field 'diffusion'");
  const auto& jq = j.at("diffusion");
  if (jq.contains("dense")) {
    diffusion = parse_dense(jq.at("dense"), dim, "diffusion.dense");
  } else if (jq.contains("block2")) {
    const auto& b2 = jq.at("block2");
    Block2Diffusion b{b2.at("q1").get<double>(), b2.at("q2").get<double>(),
                      b2.at("q3").get<double>()};
    if (b2.contains("tail") && b2.at("tail").get<std::string>() != "identity") {
      throw ModelError("diffusion.block2.tail: only 'identity' is supported");
    }
    diffusion = expand_block2(b, dim);
    block2 = b;
  } else {
    throw ModelError("diffusion must provide 'dense' or 'block2'");
  }

  std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string{};
  SpectralModel model = make_model(dim, std::move(drift), std::move(diffusion), std::move(label));
  model.drift_diag = std::move(drift_diag);
  model.diffusion_block2 = block2;
  return model;
}

nlohmann::ordered_json model_to_json(const SpectralModel& model) {
  nlohmann::ordered_json j;
  j["dim"] = model.dim;
  if (model.drift_diag) {
    nlohmann::ordered_json diag = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < model.drift_diag->size(); ++i) diag.push_back((*model.drift_diag)(i));
    j["drift"] = nlohmann::ordered_json{{"diag", std::move(diag)}};
  } else {
    j["drift"] = nlohmann::ordered_json{{"dense", dense_to_json(model.drift)}};
  }
  if (model.diffusion_block2) {
    nlohmann::ordered_json b2;
    b2["q1"] = model.diffusion_block2->q1;
    b2["q2"] = model.diffusion_block2->q2;
    b2["q3"] = model.diffusion_block2->q3;
    b2["tail"] = "identity";
    j["diffusion"] = nlohmann::ordered_json{{"block2", std::move(b2)}};
  } else {
    j["diffusion"] = nlohmann::ordered_json{{"dense", dense_to_json(model.diffusion)}};
  }
  j["label"] = model.label;
  return j;
}

SpectralModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("parse error in " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const SpectralModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model config: " + path.string());
  out << model_to_json(model).dump(2) << "\n";
}

DegeneracyFlag degeneracy(const SpectralModel& model, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.diffusion);
  const double cutoff = tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > cutoff) ++rank;
  }
  return DegeneracyFlag{rank == model.dim, rank};
}

}  // namespace oulab
