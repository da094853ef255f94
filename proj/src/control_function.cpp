#include "robustiv/control_function.hpp"

#include <algorithm>
#include <cmath>

#include "robustiv/stats.hpp"

namespace robustiv {

void BasisSpec::validate() const {
  auto check = [](const std::vector<int>& powers, const char* what) {
    if (powers.empty() || powers.front() != 1)
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be nonempty and start at 1");
    for (std::size_t k = 1; k < powers.size(); ++k)
      if (powers[k] <= powers[k - 1])
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be strictly increasing");
  };
  check(d_powers, "d_powers");
  check(z_powers, "z_powers");
  check(x_powers, "x_powers");
}

namespace {

std::string power_name(const std::string& base, int power) {
  return power == 1 ? base : "I(" + base + "^" + std::to_string(power) + ")";
}

bool same_column(const VectorXd& a, const VectorXd& b) {
  const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

// Appends base^power columns, skipping any that duplicate an existing column.
void expand(NamedMatrix& out, const MatrixXd& base, const std::vector<std::string>& names,
            const std::vector<int>& powers, std::vector<std::string>& warnings,
            std::vector<int>* kept_powers = nullptr) {
  std::vector<VectorXd> cols;
  for (int power : powers) {
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      VectorXd c = base.col(j).array().pow(double(power)).matrix();
      const std::string name = power_name(names[j], power);
      const bool dup = std::any_of(cols.begin(), cols.end(), [&](const VectorXd& e) { return same_column(e, c); });
      if (dup) {
        warnings.push_back("DuplicateColumn: dropped " + name + " (duplicates an existing column)");
        continue;
      }
      cols.push_back(std::move(c));
      out.names.push_back(name);
      if (kept_powers) kept_powers->push_back(power);
    }
  }
  out.values.resize(base.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.values.col(static_cast<Eigen::Index>(k)) = cols[k];
}

MatrixXd hcat(std::initializer_list<const MatrixXd*> blocks, bool intercept_first) {
  Eigen::Index rows = (*blocks.begin())->rows();
  Eigen::Index cols = 1;
  for (const auto* b : blocks) cols += b->cols();
  MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  if (intercept_first) out.col(at++).setOnes();
  for (const auto* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  if (!intercept_first) out.col(at).setOnes();
  return out;
}

}  // namespace

Bases build_bases(const Dataset& ds, const BasisSpec& spec) {
  spec.validate();
  Bases b;
  MatrixXd d_col = ds.d;
  expand(b.G, d_col, {"D"}, spec.d_powers, b.warnings, &b.d_powers);
  expand(b.H, ds.z, ds.z_names, spec.z_powers, b.warnings);
  expand(b.X, ds.x, ds.x_names, spec.x_powers, b.warnings);
  return b;
}

TslsFit tsls(const MatrixXd& regressors, const MatrixXd& instruments, const VectorXd& y) {
  if (instruments.cols() < regressors.cols())
    throw Error(ErrorCode::UnderIdentified, "fewer instruments than regressors");
  check_full_rank(instruments);
  const auto n = regressors.rows();
  const auto k = regressors.cols();

  Eigen::HouseholderQR<MatrixXd> qr(instruments);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, instruments.cols());
  const MatrixXd fitted = q * (q.transpose() * regressors);
  check_full_rank(fitted);

  TslsFit fit;
  Eigen::LDLT<MatrixXd> normal(fitted.transpose() * fitted);
  fit.coef = normal.solve(fitted.transpose() * y);
  const VectorXd resid = y - regressors * fit.coef;
  fit.sigma2 = resid.squaredNorm() / double(n - k);
  fit.cov = fit.sigma2 * normal.solve(MatrixXd::Identity(k, k));
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
  fit.n = n;
  return fit;
}

CfFit cf_fit(const Dataset& ds, const BasisSpec& spec) {
  const Bases b = build_bases(ds, spec);
  const auto n = ds.n();

  CfFit fit;
  fit.n = n;
  fit.d_powers = b.d_powers;
  fit.warnings = b.warnings;
  fit.first_stage = ols_fit(hcat({&b.H.values, &b.X.values}, false), ds.d, CovarianceType::Classical);
  fit.v_hat = fit.first_stage.residuals;

  // Structural regressors R = (1, G(D), X) and the control-function design (R, v_hat).
  const MatrixXd r = hcat({&b.G.values, &b.X.values}, true);
  const auto k = r.cols();
  MatrixXd design(n, k + 1);
  design << r, fit.v_hat;
  const OlsFit direct = ols_fit(design, ds.y, CovarianceType::Classical);

  // Same coefficients as TSLS of Y on R with the augmented instruments
  // M_v R = (1, D_hat, M_v g_2(D), ..., X): R with the v_hat component removed.
  const double vv = fit.v_hat.squaredNorm();
  const MatrixXd aug = r - fit.v_hat * ((fit.v_hat.transpose() * r) / vv);
  Eigen::FullPivLU<MatrixXd> cross(aug.transpose() * r);
  const VectorXd beta_aug = cross.solve(aug.transpose() * ds.y);
  const double scale = std::max(1.0, direct.coef.head(k).cwiseAbs().maxCoeff());
  fit.augmented_tsls_check = (beta_aug - direct.coef.head(k)).cwiseAbs().maxCoeff() / scale;

  fit.sigma2 = direct.residuals.squaredNorm() / double(n - k - 1);
  fit.coef = direct.coef;
  fit.coef.head(k) = beta_aug;
  fit.cov = fit.sigma2 * direct.xtx_inv / double(n);
  Eigen::LDLT<MatrixXd> qq(aug.transpose() * aug);
  fit.cov.topLeftCorner(k, k) = fit.sigma2 * qq.solve(MatrixXd::Identity(k, k));
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose());

  fit.names.push_back("(Intercept)");
  for (const auto& s : b.G.names) fit.names.push_back(s);
  for (const auto& s : b.X.names) fit.names.push_back(s);
  fit.names.push_back("v_hat");
  return fit;
}

TslsFit tsls_fit(const Dataset& ds, const BasisSpec& spec) {
  const Bases b = build_bases(ds, spec);
  const MatrixXd r = hcat({&b.G.values, &b.X.values}, true);
  const MatrixXd inst = hcat({&b.H.values, &b.X.values}, true);
  TslsFit fit = tsls(r, inst, ds.y);
  fit.d_powers = b.d_powers;
  fit.names.push_back("(Intercept)");
  for (const auto& s : b.G.names) fit.names.push_back(s);
  for (const auto& s : b.X.names) fit.names.push_back(s);
  return fit;
}

double hausman_statistic(const VectorXd& b_cf, const MatrixXd& cov_cf, const VectorXd& b_tsls,
                         const MatrixXd& cov_tsls) {
  const VectorXd diff = b_cf - b_tsls;
  const MatrixXd dm = 0.5 * ((cov_tsls - cov_cf) + (cov_tsls - cov_cf).transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(dm);
  const VectorXd& vals = eig.eigenvalues();
  const double tol = 1e-10 * vals.cwiseAbs().maxCoeff();
  const VectorXd proj = eig.eigenvectors().transpose() * diff;
  double h = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) > tol) h += proj(i) * proj(i) / vals(i);
  return h;
}

PretestResult hausman_pretest(const Dataset& ds, const BasisSpec& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  PretestResult res;
  res.alpha = alpha;
  res.cf = cf_fit(ds, spec);
  res.tsls = tsls_fit(ds, spec);
  const int g0 = res.cf.g_begin();
  const int g = res.cf.g_size();
  res.hausman_stat = hausman_statistic(res.cf.coef.segment(g0, g), res.cf.cov.block(g0, g0, g, g),
                                       res.tsls.coef.segment(g0, g), res.tsls.cov.block(g0, g0, g, g));
  res.p_value = stats::chi2_sf(res.hausman_stat, 1.0);
  res.chosen = res.p_value < alpha ? PretestChoice::TSLS : PretestChoice::ControlFunction;
  return res;
}

EffectEstimate causal_effect(const VectorXd& g_coef, const MatrixXd& g_cov,
                             const std::vector<int>& d_powers, double d1, double d2, double alpha,
                             EstimateMethod method) {
  VectorXd delta(static_cast<Eigen::Index>(d_powers.size()));
  for (std::size_t k = 0; k < d_powers.size(); ++k)
    delta(static_cast<Eigen::Index>(k)) = std::pow(d1, d_powers[k]) - std::pow(d2, d_powers[k]);
  const double est = delta.dot(g_coef);
  const double var = delta.dot(g_cov * delta);
  return normal_interval(est, std::sqrt(std::max(var, 0.0)), alpha, method);
}

EffectEstimate causal_effect(const CfFit& fit, double d1, double d2, double alpha) {
  const int g0 = fit.g_begin(), g = fit.g_size();
  return causal_effect(fit.coef.segment(g0, g), fit.cov.block(g0, g0, g, g), fit.d_powers, d1, d2,
                       alpha, EstimateMethod::ControlFunction);
}

EffectEstimate causal_effect(const TslsFit& fit, double d1, double d2, double alpha) {
  const int g0 = fit.g_begin(), g = fit.g_size();
  return causal_effect(fit.coef.segment(g0, g), fit.cov.block(g0, g0, g, g), fit.d_powers, d1, d2,
                       alpha, EstimateMethod::TSLS);
}

}  // namespace robustiv
