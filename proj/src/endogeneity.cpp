#include "robustiv/endogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robustiv/parallel.hpp"
#include "robustiv/rng.hpp"
#include "robustiv/stats.hpp"

namespace robustiv {

Sigma12Estimate sigma12_estimate(const Dataset& ds, const ReducedForm& rf, const IndexSet& valid) {
  if (valid.empty()) throw Error(ErrorCode::InvalidArgument, "valid set is empty");
  const double n = double(rf.n);
  Sigma12Estimate out;
  double num = 0.0, den = 0.0;
  for (int j : valid) {
    num += rf.gamma_hat(j) * rf.Gamma_hat(j);
    den += rf.gamma_hat(j) * rf.gamma_hat(j);
  }
  out.beta_hat = num / den;
  const VectorXd& xi = rf.xi_hat;
  const VectorXd& delta = rf.delta_hat;
  out.Theta11 = xi.squaredNorm() / n;
  out.Theta22 = delta.squaredNorm() / n;
  out.Theta12 = xi.dot(delta) / n;
  out.sigma12 = out.Theta12 - out.beta_hat * out.Theta22;

  // Influence of each unit on sigma12, including the first-order effect of
  // beta_hat: beta_hat - beta = gamma_V'(Gamma_V - beta gamma_V) / gamma_V'gamma_V
  // and Gamma - beta gamma has influence (Sigma^-1 W_i)_Z (xi_i - beta delta_i).
  const MatrixXd w = ds.w_design();
  Eigen::LDLT<MatrixXd> sigma(rf.Sigma_W);
  VectorXd lift = VectorXd::Zero(rf.Sigma_W.rows());
  for (int j : valid) lift(j) = rf.gamma_hat(j);
  const VectorXd weights = sigma.solve(lift);
  const VectorXd q = w * weights;
  const ArrayXd e = (xi - out.beta_hat * delta).array();
  const ArrayXd infl_beta = q.array() * e / den;
  const ArrayXd infl = xi.array() * delta.array() - out.beta_hat * delta.array().square() -
                       out.sigma12 - out.Theta22 * infl_beta;
  out.influence_se = std::sqrt(infl.square().sum()) / n;
  return out;
}

EndoTestResult endo_test(const Dataset& ds, const EndoOptions& eopts, const AnalysisOptions& opts) {
  opts.validate();
  const ReducedForm rf = reduced_form_fit(ds);
  const double lambda1 = opts.lambda1(ds.n());
  const double lambda2 = opts.lambda2(ds.n());

  EndoTestResult res;
  res.alpha = opts.alpha;
  res.se_method = eopts.se_method;
  if (eopts.invalid) {
    const SelectionResult sel = tsht_select(rf, lambda1, lambda2, opts.voting);
    res.S_hat = sel.S_hat;
    res.valid_set = sel.V_hats.front();
  } else {
    res.S_hat = select_relevant(rf, lambda1);
    res.valid_set = res.S_hat;
  }
  std::sort(res.valid_set.begin(), res.valid_set.end());

  const Sigma12Estimate est = sigma12_estimate(ds, rf, res.valid_set);
  res.sigma12_hat = est.sigma12;
  res.beta_hat = est.beta_hat;
  res.Theta11 = est.Theta11;
  res.Theta22 = est.Theta22;
  res.Theta12 = est.Theta12;

  if (eopts.se_method == EndoSeMethod::Influence) {
    res.se = est.influence_se;
  } else {
    if (eopts.bootstrap_reps < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 2 replicates");
    const auto reps = static_cast<std::size_t>(eopts.bootstrap_reps);
    std::vector<double> draws(reps, 0.0);
    std::vector<unsigned char> ok(reps, 0);
    parallel_for(reps, [&](std::size_t b) {
      Rng rng(opts.seed, b);
      std::vector<std::ptrdiff_t> rows(static_cast<std::size_t>(ds.n()));
      for (auto& r : rows) r = static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(ds.n())));
      try {
        const Dataset boot = ds.take_rows(rows);
        const ReducedForm brf = reduced_form_fit(boot);
        draws[b] = sigma12_estimate(boot, brf, res.valid_set).sigma12;
        ok[b] = 1;
      } catch (const Error&) {
      }
    });
    std::vector<double> good;
    for (std::size_t b = 0; b < reps; ++b)
      if (ok[b]) good.push_back(draws[b]);
    if (double(reps - good.size()) > 0.1 * double(reps))
      throw Error(ErrorCode::TooManyFailures, "more than 10% of bootstrap replicates failed");
    res.se = stats::stddev(good);
  }

  res.z_stat = res.se > 0.0 ? res.sigma12_hat / res.se : 0.0;
  res.p_value = std::erfc(std::abs(res.z_stat) / std::numbers::sqrt2);
  res.rejected = res.p_value < opts.alpha;

  for (int j : res.S_hat) {
    if (std::binary_search(res.valid_set.begin(), res.valid_set.end(), j))
      res.valid_names.push_back(ds.z_names[j]);
    else
      res.invalid_names.push_back(ds.z_names[j]);
  }
  return res;
}

}  // namespace robustiv
