#include "robustiv/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robustiv/stats.hpp"

namespace robustiv {

double check_full_rank(const MatrixXd& design) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (n <= p)
    throw Error(ErrorCode::DimensionMismatch,
                "need more rows than columns (n = " + std::to_string(n) + ", p = " + std::to_string(p) + ")");
  MatrixXd gram = design.transpose() * design;
  VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(gram(j, j) > 0.0)) throw Error(ErrorCode::RankDeficient, "design has an all-zero column");
    scale(j) = 1.0 / std::sqrt(gram(j, j));
  }
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : INFINITY;
  if (!(cond <= kMaxConditionNumber))
    throw Error(ErrorCode::RankDeficient, "design is rank deficient (condition number of Gram matrix above 1e12)");
  return cond;
}

MatrixXd sandwich(const MatrixXd& design, const MatrixXd& xtx_inv, const VectorXd& r1,
                  const VectorXd& r2) {
  const double n = double(design.rows());
  const VectorXd w = r1.cwiseProduct(r2);
  const MatrixXd meat = design.transpose() * w.asDiagonal() * design;
  MatrixXd out = xtx_inv * meat * xtx_inv / n;
  return 0.5 * (out + out.transpose());
}

OlsFit ols_fit(const MatrixXd& design, const VectorXd& y, CovarianceType type) {
  if (design.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "design and response lengths differ");
  check_full_rank(design);
  const auto n = design.rows();
  const auto p = design.cols();

  Eigen::HouseholderQR<MatrixXd> qr(design);
  OlsFit fit;
  fit.coef = qr.solve(y);
  fit.residuals = y - design * fit.coef;

  const MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
  fit.xtx_inv = double(n) * (r_inv * r_inv.transpose());
  fit.xtx_inv = 0.5 * (fit.xtx_inv + fit.xtx_inv.transpose());

  fit.sigma2 = fit.residuals.squaredNorm() / double(n - p);
  fit.cov_type = type;
  if (type == CovarianceType::Robust)
    fit.cov = sandwich(design, fit.xtx_inv, fit.residuals, fit.residuals);
  else
    fit.cov = fit.sigma2 * fit.xtx_inv;
  return fit;
}

MatrixXd clip_psd(const MatrixXd& m, double floor) {
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  VectorXd vals = eig.eigenvalues().cwiseMax(floor);
  MatrixXd out = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

MatrixXd ReducedForm::joint_cov() const {
  const auto p = pz();
  MatrixXd joint(2 * p, 2 * p);
  joint.topLeftCorner(p, p) = V_Gamma;
  joint.topRightCorner(p, p) = C;
  joint.bottomLeftCorner(p, p) = C.transpose();
  joint.bottomRightCorner(p, p) = V_gamma;
  return clip_psd(joint);
}

ReducedForm reduced_form_fit(const Dataset& ds) {
  const MatrixXd w = ds.w_design();
  const auto pz = ds.pz();
  const OlsFit fy = ols_fit(w, ds.y, CovarianceType::Robust);
  const OlsFit fd = ols_fit(w, ds.d, CovarianceType::Robust);

  ReducedForm rf;
  rf.n = ds.n();
  rf.Gamma_hat = fy.coef.head(pz);
  rf.gamma_hat = fd.coef.head(pz);
  rf.V_Gamma = fy.cov.topLeftCorner(pz, pz);
  rf.V_gamma = fd.cov.topLeftCorner(pz, pz);
  rf.C = sandwich(w, fy.xtx_inv, fy.residuals, fd.residuals).topLeftCorner(pz, pz);
  rf.Sigma_W = w.transpose() * w / double(ds.n());
  rf.Sigma_W = 0.5 * (rf.Sigma_W + rf.Sigma_W.transpose());
  rf.xi_hat = fy.residuals;
  rf.delta_hat = fd.residuals;
  return rf;
}

// Probit ---------------------------------------------------------------------

namespace {

// d log-likelihood / d eta and the negative second derivative for one unit.
inline void probit_terms(double eta, double y, double& g, double& w) {
  if (y > 0.5) {
    const double lam = stats::mills_ratio(eta);
    g = lam;
    w = lam * (lam + eta);
  } else {
    const double lam = stats::mills_ratio(-eta);
    g = -lam;
    w = lam * (lam - eta);
  }
}

void check_binary(const VectorXd& y) {
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 0.0) has0 = true;
    else if (y(i) == 1.0) has1 = true;
    else throw Error(ErrorCode::InvalidArgument, "probit outcome must be 0/1");
  }
  if (!(has0 && has1)) throw Error(ErrorCode::OneClassOnly, "probit outcome has a single class");
}

}  // namespace

double probit_loglik(const MatrixXd& design, const VectorXd& y, const VectorXd& coef) {
  const VectorXd eta = design * coef;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += y(i) > 0.5 ? stats::log_normal_cdf(eta(i)) : stats::log_normal_cdf(-eta(i));
  return ll;
}

VectorXd probit_score(const MatrixXd& design, const VectorXd& y, const VectorXd& coef) {
  const VectorXd eta = design * coef;
  VectorXd g(eta.size());
  double w = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) probit_terms(eta(i), y(i), g(i), w);
  return design.transpose() * g;
}

MatrixXd probit_hessian(const MatrixXd& design, const VectorXd& y, const VectorXd& coef) {
  const VectorXd eta = design * coef;
  VectorXd w(eta.size());
  double g = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) probit_terms(eta(i), y(i), g, w(i));
  return -(design.transpose() * w.asDiagonal() * design);
}

ProbitFit probit_fit(const MatrixXd& design, const VectorXd& y, const ProbitControl& control) {
  if (design.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "design and response lengths differ");
  check_binary(y);
  check_full_rank(design);
  const auto n = design.rows();
  const auto p = design.cols();

  VectorXd coef = VectorXd::Zero(p);
  VectorXd eta = VectorXd::Zero(n);
  VectorXd g(n), w(n);
  auto loglik_at = [&](const VectorXd& e) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      ll += y(i) > 0.5 ? stats::log_normal_cdf(e(i)) : stats::log_normal_cdf(-e(i));
    return ll;
  };
  double ll = loglik_at(eta);

  ProbitFit fit;
  for (int iter = 0; iter <= control.max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) probit_terms(eta(i), y(i), g(i), w(i));
    const VectorXd score = design.transpose() * g;
    const MatrixXd info = design.transpose() * w.asDiagonal() * design;
    fit.iterations = iter;
    if (score.cwiseAbs().maxCoeff() / double(n) <= control.gradient_tolerance) {
      fit.converged = true;
      fit.coef = coef;
      fit.loglik = ll;
      Eigen::LDLT<MatrixXd> ldlt(info);
      fit.cov = ldlt.solve(MatrixXd::Identity(p, p));
      fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
      break;
    }
    if (iter == control.max_iterations) break;

    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
      throw Error(ErrorCode::NotConverged, "probit information matrix is singular (possible separation)");
    const VectorXd step = ldlt.solve(score);
    const VectorXd deta = design * step;

    double t = 1.0;
    bool improved = false;
    for (int h = 0; h <= control.max_halvings; ++h, t *= 0.5) {
      const VectorXd trial = eta + t * deta;
      const double ll_new = loglik_at(trial);
      if (std::isfinite(ll_new) && ll_new >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        coef += t * step;
        eta = trial;
        ll = ll_new;
        improved = true;
        break;
      }
    }
    if (!improved)
      throw Error(ErrorCode::NotConverged, "probit line search exhausted step halving");
  }
  if (!fit.converged)
    throw Error(ErrorCode::NotConverged, "probit did not converge within " +
                                             std::to_string(control.max_iterations) + " iterations");

  // A finite optimum cannot classify every unit strictly correctly; if the
  // fit does, the classes are separable and the MLE does not exist.
  bool separated = true;
  for (Eigen::Index i = 0; i < n && separated; ++i)
    separated = y(i) > 0.5 ? eta(i) > 0.0 : eta(i) < 0.0;
  if (separated)
    throw Error(ErrorCode::NotConverged, "probit outcome is perfectly separated by the design");
  return fit;
}

}  // namespace robustiv
