#include "robustiv/probit_cf.hpp"

#include <algorithm>
#include <cmath>

#include "robustiv/parallel.hpp"
#include "robustiv/rng.hpp"
#include "robustiv/stats.hpp"

namespace robustiv {

IndexSet probit_select(const VectorXd& gamma_hat, const MatrixXd& Sigma_hat, double sigma_v_hat,
                       std::ptrdiff_t n, std::ptrdiff_t pz) {
  Eigen::FullPivLU<MatrixXd> lu(Sigma_hat);
  if (!lu.isInvertible()) throw Error(ErrorCode::RankDeficient, "Sigma_hat is singular");
  const MatrixXd inv = lu.inverse();
  IndexSet s;
  const double scale = 2.0 * std::log(double(n)) / double(n);
  for (std::ptrdiff_t j = 0; j < pz; ++j)
    if (std::abs(gamma_hat(j)) >= sigma_v_hat * std::sqrt(inv(j, j) * scale)) s.push_back(static_cast<int>(j));
  if (s.empty()) throw Error(ErrorCode::NoRelevantIV, "no instrument passed the first-stage threshold");
  return s;
}

double median_of_ratios(const VectorXd& numer, const VectorXd& denom, const IndexSet& idx) {
  if (idx.empty()) throw Error(ErrorCode::InvalidArgument, "median over an empty set");
  std::vector<double> r;
  r.reserve(idx.size());
  for (int j : idx) r.push_back(numer(j) / denom(j));
  return stats::median(r);
}

ProbitCfFit probit_cf_fit(const Dataset& ds, bool invalid, const AnalysisOptions& opts) {
  opts.validate();
  const MatrixXd w = ds.w_design();
  const auto n = ds.n();
  const auto pw = w.cols();

  ProbitCfFit fit;
  fit.first_stage = ols_fit(w, ds.d, CovarianceType::Robust);
  fit.gamma_hat = fit.first_stage.coef;
  fit.v_hat = fit.first_stage.residuals;
  fit.sigma_v_hat = std::sqrt(fit.first_stage.sigma2);
  const MatrixXd sigma_hat = w.transpose() * w / double(n);
  fit.S_hat = probit_select(fit.gamma_hat, sigma_hat, fit.sigma_v_hat, n, ds.pz());

  MatrixXd design(n, pw + 1);
  design << w, fit.v_hat;
  fit.probit = probit_fit(design, ds.y);
  fit.Gamma_hat = fit.probit.coef.head(pw);
  fit.rho_hat = fit.probit.coef(pw);

  fit.beta_hat = median_of_ratios(fit.Gamma_hat, fit.gamma_hat, fit.S_hat);
  fit.kappa_hat = fit.Gamma_hat - fit.gamma_hat * fit.beta_hat;

  if (invalid) {
    const double z = stats::normal_quantile(1.0 - opts.alpha / (2.0 * double(fit.S_hat.size())));
    for (int j : fit.S_hat) {
      const double var = fit.probit.cov(j, j) +
                         fit.beta_hat * fit.beta_hat * fit.first_stage.cov(j, j) / double(n);
      if (std::abs(fit.kappa_hat(j)) > z * std::sqrt(var)) fit.invalid_detected.push_back(j);
    }
  }
  for (int j : fit.S_hat)
    if (std::find(fit.invalid_detected.begin(), fit.invalid_detected.end(), j) == fit.invalid_detected.end())
      fit.valid_set.push_back(j);
  return fit;
}

namespace {

double partial_mean(const ProbitCfFit& fit, double d, double index, double rho) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < fit.v_hat.size(); ++i)
    s += stats::normal_cdf(d * fit.beta_hat + index + fit.v_hat(i) * rho);
  return s / double(fit.v_hat.size());
}

}  // namespace

double cate(const ProbitCfFit& fit, double d1, double d2, const VectorXd& w0) {
  const auto pw = fit.kappa_hat.size();
  if (w0.size() != pw - 1)
    throw Error(ErrorCode::DimensionMismatch, "w0 must have one entry per instrument and covariate");
  const double index = w0.dot(fit.kappa_hat.head(pw - 1)) + fit.kappa_hat(pw - 1);
  const double rho = fit.confounding_coef();
  return partial_mean(fit, d1, index, rho) - partial_mean(fit, d2, index, rho);
}

CateResult cate_ci(const Dataset& ds, double d1, double d2, const VectorXd& w0,
                   const CateOptions& copts, const AnalysisOptions& opts) {
  if (copts.B < 100) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 100 replicates");
  CateResult res;
  res.fit = probit_cf_fit(ds, copts.invalid, opts);
  res.estimate = cate(res.fit, d1, d2, w0);
  res.beta_hat = res.fit.beta_hat;
  res.d1 = d1;
  res.d2 = d2;
  res.w0 = w0;
  res.B = copts.B;

  const auto reps = static_cast<std::size_t>(copts.B);
  std::vector<double> cates(reps, 0.0), betas(reps, 0.0);
  std::vector<unsigned char> ok(reps, 0);
  parallel_for(reps, [&](std::size_t b) {
    Rng rng(opts.seed, b);
    std::vector<std::ptrdiff_t> rows(static_cast<std::size_t>(ds.n()));
    for (auto& r : rows) r = static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(ds.n())));
    try {
      const ProbitCfFit f = probit_cf_fit(ds.take_rows(rows), copts.invalid, opts);
      cates[b] = cate(f, d1, d2, w0);
      betas[b] = f.beta_hat;
      ok[b] = 1;
    } catch (const Error& e) {
      if (!is_statistical(e.code())) throw;
    }
  });

  std::vector<double> gc, gb;
  for (std::size_t b = 0; b < reps; ++b) {
    if (!ok[b]) continue;
    gc.push_back(cates[b]);
    gb.push_back(betas[b]);
  }
  res.failures = static_cast<int>(reps - gc.size());
  if (double(res.failures) > 0.1 * double(reps))
    throw Error(ErrorCode::TooManyFailures, "more than 10% of bootstrap replicates failed");

  const double a = opts.alpha / 2.0;
  res.se = stats::stddev(gc);
  res.lower = std::clamp(std::min(stats::quantile(gc, a), res.estimate), -1.0, 1.0);
  res.upper = std::clamp(std::max(stats::quantile(gc, 1.0 - a), res.estimate), -1.0, 1.0);
  res.beta_se = stats::stddev(gb);
  res.beta_lower = stats::quantile(gb, a);
  res.beta_upper = stats::quantile(gb, 1.0 - a);
  return res;
}

VectorXd default_w0(const Dataset& ds, std::optional<double> d_equal) {
  const auto p = ds.pz() + ds.px();
  VectorXd sum = VectorXd::Zero(p);
  std::ptrdiff_t count = 0;
  for (std::ptrdiff_t i = 0; i < ds.n(); ++i) {
    if (d_equal && std::abs(ds.d(i) - *d_equal) > 1e-9) continue;
    sum.head(ds.pz()) += ds.z.row(i).transpose();
    sum.tail(ds.px()) += ds.x.row(i).transpose();
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "no rows with the requested treatment value");
  return sum / double(count);
}

}  // namespace robustiv
