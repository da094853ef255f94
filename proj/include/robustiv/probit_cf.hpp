#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustiv/dataset.hpp"
#include "robustiv/regression.hpp"
#include "robustiv/tsht.hpp"

namespace robustiv {

/// Probit control-function fit on W = (Z, X, 1).
///
/// Gamma_hat are the probit coefficients on W and rho_hat the coefficient on
/// v_hat. Because v_hat is part of D, rho_hat absorbs beta_hat; the
/// confounding coefficient used in the partial mean is rho_hat - beta_hat.
struct ProbitCfFit {
  VectorXd gamma_hat;  // first stage on W
  VectorXd v_hat;
  double sigma_v_hat = 0.0;
  IndexSet S_hat;
  VectorXd Gamma_hat;  // probit on W
  double rho_hat = 0.0;
  double beta_hat = 0.0;
  VectorXd kappa_hat;  // Gamma_hat - gamma_hat * beta_hat, over W
  IndexSet invalid_detected;
  IndexSet valid_set;  // S_hat minus invalid_detected
  ProbitFit probit;
  OlsFit first_stage;

  double confounding_coef() const { return rho_hat - beta_hat; }
};

/// { j < p_z : |gamma_j| >= sigma_v sqrt(2 {Sigma^-1}_jj log n / n) }.
IndexSet probit_select(const VectorXd& gamma_hat, const MatrixXd& Sigma_hat,
                       double sigma_v_hat, std::ptrdiff_t n, std::ptrdiff_t pz);

/// Median with even-size midpoint.
double median_of_ratios(const VectorXd& numer, const VectorXd& denom, const IndexSet& idx);

/// `y` must be binary. With invalid = true, members of S_hat whose
/// studentized kappa exceeds z_{1 - alpha / (2 |S_hat|)} are reported as
/// invalid; otherwise all of S_hat is treated as valid.
ProbitCfFit probit_cf_fit(const Dataset& ds, bool invalid, const AnalysisOptions& opts);

/// Partial-mean CATE at w0 (length p_z + p_x; the intercept is appended).
double cate(const ProbitCfFit& fit, double d1, double d2, const VectorXd& w0);

struct CateResult {
  double estimate = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  VectorXd w0;
  int B = 0;
  int failures = 0;
  // Bootstrap inference for beta_hat from the same replicates.
  double beta_hat = 0.0;
  double beta_se = 0.0;
  double beta_lower = 0.0;
  double beta_upper = 0.0;
  ProbitCfFit fit;
};

struct CateOptions {
  int B = 500;
  bool invalid = true;
};

/// Pairs bootstrap of the whole pipeline (S_hat re-selected per replicate).
/// Throws TooManyFailures when more than 10% of replicates fail.
CateResult cate_ci(const Dataset& ds, double d1, double d2, const VectorXd& w0,
                   const CateOptions& copts, const AnalysisOptions& opts);

/// Column means of (Z, X), optionally restricted to rows with D == d.
VectorXd default_w0(const Dataset& ds, std::optional<double> d_equal = std::nullopt);

}  // namespace robustiv
