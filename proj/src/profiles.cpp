#include "oulab/profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace oulab {

namespace {

// Value and first two derivatives of one polynomial-times-bump factor
// p(x)·exp(-x²/(2w²)).
struct Factor1d {
  double value, d1, d2;
};

Factor1d poly_bump_factor(const Eigen::VectorXd& coeffs, double w, double x) {
  double p = 0.0, dp = 0.0, ddp = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) {
    ddp = ddp * x + 2.0 * dp;
    dp = dp * x + p;
    p = p * x + coeffs(k);
  }
  const double g = std::exp(-0.5 * x * x / (w * w));
  const double gd = -x / (w * w);
  Factor1d f;
  f.value = p * g;
  f.d1 = (dp + p * gd) * g;
  f.d2 = (ddp + 2.0 * dp * gd + p * (gd * gd - 1.0 / (w * w))) * g;
  return f;
}

Eigen::VectorXd pad_vec(const Eigen::VectorXd& head, Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out.head(head.size()) = head;
  return out;
}

Eigen::MatrixXd pad_mat(const Eigen::MatrixXd& block, Eigen::Index n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  out.topLeftCorner(block.rows(), block.cols()) = block;
  return out;
}

}  // namespace

CylinderFunction CylinderFunction::constant(double value) {
  CylinderFunction f;
  f.arity_ = 0;
  f.impl_ = Cosine{Eigen::VectorXd(), 0.0, value};
  return f;
}

CylinderFunction CylinderFunction::cosine(Eigen::VectorXd a, double b) {
  CylinderFunction f;
  f.arity_ = static_cast<int>(a.size());
  f.impl_ = Cosine{std::move(a), b, 1.0};
  return f;
}

CylinderFunction CylinderFunction::gaussian_bump(Eigen::VectorXd center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
  CylinderFunction f;
  f.arity_ = static_cast<int>(center.size());
  f.impl_ = Bump{std::move(center), width};
  return f;
}

CylinderFunction CylinderFunction::poly_bump(std::vector<Eigen::VectorXd> coeffs, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("poly_bump: width must be positive");
  if (coeffs.empty()) throw std::invalid_argument("poly_bump: needs at least one factor");
  CylinderFunction f;
  f.arity_ = static_cast<int>(coeffs.size());
  f.impl_ = PolyBump{std::move(coeffs), width};
  return f;
}

double CylinderFunction::value(const Eigen::VectorXd& xi) const {
  if (xi.size() < arity_) throw std::invalid_argument("CylinderFunction: argument too short");
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    return c->scale * std::cos(c->a.dot(xi.head(arity_)) + c->b);
  }
  if (const auto* g = std::get_if<Bump>(&impl_)) {
    const Eigen::VectorXd d = xi.head(arity_) - g->center;
    return std::exp(-0.5 * d.squaredNorm() / (g->width * g->width));
  }
  const auto& p = std::get<PolyBump>(impl_);
  double prod = 1.0;
  for (int i = 0; i < arity_; ++i) prod *= poly_bump_factor(p.coeffs[i], p.width, xi(i)).value;
  return prod;
}

Eigen::VectorXd CylinderFunction::gradient(const Eigen::VectorXd& xi) const {
  if (xi.size() < arity_) throw std::invalid_argument("CylinderFunction: argument too short");
  const Eigen::Index n = xi.size();
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) return Eigen::VectorXd::Zero(n);
    const double s = std::sin(c->a.dot(xi.head(arity_)) + c->b);
    return pad_vec((-c->scale * s) * c->a, n);
  }
  if (const auto* g = std::get_if<Bump>(&impl_)) {
    const Eigen::VectorXd d = xi.head(arity_) - g->center;
    const double v = std::exp(-0.5 * d.squaredNorm() / (g->width * g->width));
    return pad_vec((-v / (g->width * g->width)) * d, n);
  }
  const auto& p = std::get<PolyBump>(impl_);
  std::vector<Factor1d> f(arity_);
  for (int i = 0; i < arity_; ++i) f[i] = poly_bump_factor(p.coeffs[i], p.width, xi(i));
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < arity_; ++i) {
    double term = f[i].d1;
    for (int j = 0; j < arity_; ++j) {
      if (j != i) term *= f[j].value;
    }
    grad(i) = term;
  }
  return grad;
}

Eigen::MatrixXd CylinderFunction::hessian(const Eigen::VectorXd& xi) const {
  if (xi.size() < arity_) throw std::invalid_argument("CylinderFunction: argument too short");
  const Eigen::Index n = xi.size();
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) return Eigen::MatrixXd::Zero(n, n);
    const double cv = std::cos(c->a.dot(xi.head(arity_)) + c->b);
    return pad_mat((-c->scale * cv) * (c->a * c->a.transpose()), n);
  }
  if (const auto* g = std::get_if<Bump>(&impl_)) {
    const double w2 = g->width * g->width;
    const Eigen::VectorXd d = xi.head(arity_) - g->center;
    const double v = std::exp(-0.5 * d.squaredNorm() / w2);
    Eigen::MatrixXd block = (v / (w2 * w2)) * (d * d.transpose());
    block -= (v / w2) * Eigen::MatrixXd::Identity(arity_, arity_);
    return pad_mat(block, n);
  }
  const auto& p = std::get<PolyBump>(impl_);
  std::vector<Factor1d> f(arity_);
  for (int i = 0; i < arity_; ++i) f[i] = poly_bump_factor(p.coeffs[i], p.width, xi(i));
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < arity_; ++i) {
    for (int j = 0; j < arity_; ++j) {
      double term = (i == j) ? f[i].d2 : f[i].d1 * f[j].d1;
      for (int k = 0; k < arity_; ++k) {
        if (k != i && k != j) term *= f[k].value;
      }
      hess(i, j) = term;
    }
  }
  return hess;
}

double CylinderFunction::sup_norm() const {
  if (const auto* c = std::get_if<Cosine>(&impl_)) return std::abs(c->scale);
  if (std::holds_alternative<Bump>(impl_)) return 1.0;
  // Coarse but safe bound for the polynomial-times-bump family: maximize each
  // factor on a fine grid; the bump confines the mass to a few widths.
  const auto& p = std::get<PolyBump>(impl_);
  double prod = 1.0;
  for (int i = 0; i < arity_; ++i) {
    double best = 0.0;
    const double lim = 12.0 * p.width;
    for (int k = 0; k <= 4000; ++k) {
      const double x = -lim + 2.0 * lim * k / 4000.0;
      best = std::max(best, std::abs(poly_bump_factor(p.coeffs[i], p.width, x).value));
    }
    prod *= best;
  }
  return prod;
}

bool CylinderFunction::has_gaussian_moments() const {
  return !std::holds_alternative<PolyBump>(impl_);
}

double CylinderFunction::moment_value(const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& cov) const {
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) return c->scale * std::cos(c->b);
    const auto a = c->a;
    const double damp = std::exp(-0.5 * a.dot(cov.topLeftCorner(arity_, arity_) * a));
    return c->scale * damp * std::cos(a.dot(mean.head(arity_)) + c->b);
  }
  if (const auto* g = std::get_if<Bump>(&impl_)) {
    const int k = arity_;
    const double w2 = g->width * g->width;
    const Eigen::MatrixXd s = cov.topLeftCorner(k, k) + w2 * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd d = mean.head(k) - g->center;
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    const Eigen::VectorXd sid = llt.solve(d);
    double logdet = 0.0;
    for (int i = 0; i < k; ++i) logdet += std::log(llt.matrixL()(i, i));
    return std::exp(k * std::log(g->width) - logdet - 0.5 * d.dot(sid));
  }
  throw std::logic_error("CylinderFunction: no closed-form Gaussian moments");
}

Eigen::VectorXd CylinderFunction::moment_gradient(const Eigen::VectorXd& mean,
                                                  const Eigen::MatrixXd& cov) const {
  const Eigen::Index n = mean.size();
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) return Eigen::VectorXd::Zero(n);
    const auto a = c->a;
    const double damp = std::exp(-0.5 * a.dot(cov.topLeftCorner(arity_, arity_) * a));
    const double s = std::sin(a.dot(mean.head(arity_)) + c->b);
    return pad_vec((-c->scale * damp * s) * a, n);
  }
  if (std::holds_alternative<Bump>(impl_)) {
    const auto& g = std::get<Bump>(impl_);
    const int k = arity_;
    const double w2 = g.width * g.width;
    const Eigen::MatrixXd s = cov.topLeftCorner(k, k) + w2 * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd d = mean.head(k) - g.center;
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    const Eigen::VectorXd sid = llt.solve(d);
    return pad_vec(-moment_value(mean, cov) * sid, n);
  }
  throw std::logic_error("CylinderFunction: no closed-form Gaussian moments");
}

Eigen::MatrixXd CylinderFunction::moment_hessian(const Eigen::VectorXd& mean,
                                                 const Eigen::MatrixXd& cov) const {
  const Eigen::Index n = mean.size();
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) return Eigen::MatrixXd::Zero(n, n);
    const auto a = c->a;
    const double damp = std::exp(-0.5 * a.dot(cov.topLeftCorner(arity_, arity_) * a));
    const double cv = std::cos(a.dot(mean.head(arity_)) + c->b);
    return pad_mat((-c->scale * damp * cv) * (a * a.transpose()), n);
  }
  if (std::holds_alternative<Bump>(impl_)) {
    const auto& g = std::get<Bump>(impl_);
    const int k = arity_;
    const double w2 = g.width * g.width;
    const Eigen::MatrixXd s = cov.topLeftCorner(k, k) + w2 * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd d = mean.head(k) - g.center;
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    const Eigen::VectorXd sid = llt.solve(d);
    const Eigen::MatrixXd sinv = llt.solve(Eigen::MatrixXd::Identity(k, k));
    return pad_mat(moment_value(mean, cov) * (sid * sid.transpose() - sinv), n);
  }
  throw std::logic_error("CylinderFunction: no closed-form Gaussian moments");
}

CylinderFunction CylinderFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) {
    throw std::invalid_argument("profile: expected a single-key object");
  }
  if (j.contains("constant")) return constant(j.at("constant").get<double>());
  if (j.contains("cosine")) {
    const auto& c = j.at("cosine");
    const auto& ja = c.at("a");
    Eigen::VectorXd a(ja.size());
    for (std::size_t i = 0; i < ja.size(); ++i) a(static_cast<Eigen::Index>(i)) = ja.at(i).get<double>();
    return cosine(std::move(a), c.value("b", 0.0));
  }
  if (j.contains("gaussian")) {
    const auto& g = j.at("gaussian");
    const auto& jc = g.at("center");
    Eigen::VectorXd c(jc.size());
    for (std::size_t i = 0; i < jc.size(); ++i) c(static_cast<Eigen::Index>(i)) = jc.at(i).get<double>();
    return gaussian_bump(std::move(c), g.at("width").get<double>());
  }
  if (j.contains("polybump")) {
    const auto& p = j.at("polybump");
    std::vector<Eigen::VectorXd> coeffs;
    for (const auto& jc : p.at("coeffs")) {
      Eigen::VectorXd c(jc.size());
      for (std::size_t i = 0; i < jc.size(); ++i) c(static_cast<Eigen::Index>(i)) = jc.at(i).get<double>();
      coeffs.push_back(std::move(c));
    }
    return poly_bump(std::move(coeffs), p.at("width").get<double>());
  }
  throw std::invalid_argument("profile: unknown kind");
}

nlohmann::ordered_json CylinderFunction::to_json() const {
  nlohmann::ordered_json j;
  if (const auto* c = std::get_if<Cosine>(&impl_)) {
    if (arity_ == 0) {
      j["constant"] = c->scale * std::cos(c->b);
      return j;
    }
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < c->a.size(); ++i) a.push_back(c->a(i));
    j["cosine"] = nlohmann::ordered_json{{"a", std::move(a)}, {"b", c->b}};
    return j;
  }
  if (const auto* g = std::get_if<Bump>(&impl_)) {
    nlohmann::ordered_json center = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < g->center.size(); ++i) center.push_back(g->center(i));
    j["gaussian"] = nlohmann::ordered_json{{"center", std::move(center)}, {"width", g->width}};
    return j;
  }
  const auto& p = std::get<PolyBump>(impl_);
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (const auto& c : p.coeffs) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i) row.push_back(c(i));
    coeffs.push_back(std::move(row));
  }
  j["polybump"] = nlohmann::ordered_json{{"coeffs", std::move(coeffs)}, {"width", p.width}};
  return j;
}

}  // namespace oulab
