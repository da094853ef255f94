#include "robustiv/simulate.hpp"

#include <cmath>
#include <numbers>

#include "robustiv/rng.hpp"
#include "robustiv/stats.hpp"

namespace robustiv {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void LinearSimConfig::validate() const {
  require(n > pz + px + 1, "n must exceed p_z + p_x + 1");
  require(pz >= 1 && px >= 0, "p_z must be positive and p_x nonnegative");
  require(gamma.size() == pz && pi.size() == pz, "gamma and pi must have length p_z");
  require(phi.size() == px && psi.size() == px, "phi and psi must have length p_x");
  require(std::abs(err_corr) < 1.0, "err_corr must lie in (-1, 1)");
}

LinearSimConfig default_linear_config(std::ptrdiff_t n, int pz, int px, int n_invalid,
                                      double err_corr, std::uint64_t seed) {
  require(n_invalid >= 0 && n_invalid <= pz, "n_invalid must lie in [0, p_z]");
  LinearSimConfig cfg;
  cfg.n = n;
  cfg.pz = pz;
  cfg.px = px;
  cfg.gamma = VectorXd::Ones(pz);
  cfg.pi = VectorXd::Zero(pz);
  cfg.pi.head(n_invalid).setOnes();
  cfg.phi.resize(px);
  cfg.psi.resize(px);
  for (int k = 0; k < px; ++k) {
    cfg.phi(k) = double(k + 1) / px + 0.5;
    cfg.psi(k) = double(k + 1) / px + 1.0;
  }
  cfg.err_corr = err_corr;
  cfg.seed = seed;
  return cfg;
}

LinearSim gen_linear_iv(const LinearSimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto n = cfg.n;
  const double r = cfg.err_corr;
  const double s = std::sqrt(1.0 - r * r);

  Dataset ds;
  ds.y.resize(n);
  ds.d.resize(n);
  ds.z.resize(n, cfg.pz);
  ds.x.resize(n, cfg.px);
  LinearTruth truth;
  truth.epsilon.resize(n);
  truth.delta.resize(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.pz; ++j) ds.z(i, j) = rng.normal();
    for (int k = 0; k < cfg.px; ++k) ds.x(i, k) = rng.normal();
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    double eps = e1;
    const double delta = r * e1 + s * e2;
    if (cfg.heteroscedastic) eps *= std::sqrt((1.0 + ds.z(i, 0) * ds.z(i, 0)) / 2.0);
    truth.epsilon(i) = eps;
    truth.delta(i) = delta;
  }
  ds.d = (0.5 + (ds.z * cfg.gamma).array() + (ds.x * cfg.psi).array()).matrix() + truth.delta;
  ds.y = (-0.5 + cfg.beta * ds.d.array() + (ds.z * cfg.pi).array() + (ds.x * cfg.phi).array()).matrix() +
         truth.epsilon;

  truth.beta = cfg.beta;
  truth.gamma = cfg.gamma;
  truth.pi = cfg.pi;
  if (cfg.heteroscedastic) {
    std::vector<double> x, w;
    gauss_hermite(64, x, w);
    double scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double z = std::numbers::sqrt2 * x[k];
      scale += w[k] * std::sqrt((1.0 + z * z) / 2.0);
    }
    truth.sigma12 = r * scale / std::sqrt(std::numbers::pi);
  } else {
    truth.sigma12 = r;
  }
  for (int j = 0; j < cfg.pz; ++j) (cfg.pi(j) == 0.0 ? truth.valid : truth.invalid).push_back(j);
  return {validate_dataset(std::move(ds)), std::move(truth)};
}

void ProbitSimConfig::validate() const {
  require(n > pz + px + 2, "n must exceed p_z + p_x + 2");
  require(pz >= 1 && px >= 0, "p_z must be positive and p_x nonnegative");
  require(gamma_z.size() == pz && kappa_z.size() == pz, "gamma_z and kappa_z must have length p_z");
  require(gamma_x.size() == px && kappa_x.size() == px, "gamma_x and kappa_x must have length p_x");
  require(sigma_u > 0.0 && sigma_v > 0.0, "error SDs must be positive");
  require(std::abs(err_corr) < 1.0, "err_corr must lie in (-1, 1)");
}

namespace {

ProbitTruth probit_truth(const ProbitSimConfig& cfg) {
  ProbitTruth t;
  t.kappa_w.resize(cfg.pz + cfg.px + 1);
  t.kappa_w << cfg.kappa_z, cfg.kappa_x, cfg.y_intercept;
  t.gamma_w.resize(cfg.pz + cfg.px + 1);
  t.gamma_w << cfg.gamma_z, cfg.gamma_x, cfg.d_intercept;
  t.beta = cfg.beta;
  t.rho = cfg.err_corr * cfg.sigma_u / cfg.sigma_v;
  t.sigma_e = cfg.sigma_u * std::sqrt(1.0 - cfg.err_corr * cfg.err_corr);
  t.beta_star = cfg.beta / t.sigma_e;
  return t;
}

}  // namespace

ProbitSim gen_probit_iv(const ProbitSimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto n = cfg.n;
  const double r = cfg.err_corr;
  const double s = std::sqrt(1.0 - r * r);

  Dataset ds;
  ds.y.resize(n);
  ds.d.resize(n);
  ds.z.resize(n, cfg.pz);
  ds.x.resize(n, cfg.px);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.pz; ++j) ds.z(i, j) = rng.normal();
    for (int k = 0; k < cfg.px; ++k) ds.x(i, k) = rng.normal();
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    const double v = cfg.sigma_v * e1;
    const double u = cfg.sigma_u * (r * e1 + s * e2);
    const double d = cfg.d_intercept + ds.z.row(i).dot(cfg.gamma_z) + ds.x.row(i).dot(cfg.gamma_x) + v;
    const double latent = d * cfg.beta + cfg.y_intercept + ds.z.row(i).dot(cfg.kappa_z) +
                          ds.x.row(i).dot(cfg.kappa_x) + u;
    ds.d(i) = d;
    ds.y(i) = latent > 0.0 ? 1.0 : 0.0;
  }
  return {validate_dataset(std::move(ds)), probit_truth(cfg)};
}

void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w) {
  require(nodes >= 1, "need at least one node");
  MatrixXd jacobi = MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(jacobi);
  x.resize(static_cast<std::size_t>(nodes));
  w.resize(static_cast<std::size_t>(nodes));
  const double root_pi = std::sqrt(std::numbers::pi);
  for (int k = 0; k < nodes; ++k) {
    x[static_cast<std::size_t>(k)] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = root_pi * v0 * v0;
  }
}

double probit_structural_mean(const ProbitSimConfig& cfg, double d, const VectorXd& w0, int nodes) {
  cfg.validate();
  if (w0.size() != cfg.pz + cfg.px) throw Error(ErrorCode::DimensionMismatch, "w0 has the wrong length");
  const ProbitTruth t = probit_truth(cfg);
  const double index = d * cfg.beta + w0.dot(t.kappa_w.head(w0.size())) + cfg.y_intercept;
  std::vector<double> x, w;
  gauss_hermite(nodes, x, w);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = std::numbers::sqrt2 * cfg.sigma_v * x[k];
    s += w[k] * stats::normal_cdf((index + t.rho * v) / t.sigma_e);
  }
  return s / std::sqrt(std::numbers::pi);
}

double probit_true_cate(const ProbitSimConfig& cfg, double d1, double d2, const VectorXd& w0,
                        int nodes) {
  return probit_structural_mean(cfg, d1, w0, nodes) - probit_structural_mean(cfg, d2, w0, nodes);
}

}  // namespace robustiv
