#pragma once

#include <string>
#include <vector>

#include "robustiv/dataset.hpp"
#include "robustiv/regression.hpp"
#include "robustiv/tsht.hpp"

namespace robustiv {

/// Polynomial bases for the treatment G(D), the instruments H(Z) and the
/// covariates. Each list must be nonempty, start at 1 and increase strictly.
struct BasisSpec {
  std::vector<int> d_powers{1, 2};
  std::vector<int> z_powers{1, 2};
  std::vector<int> x_powers{1};

  void validate() const;
};

struct NamedMatrix {
  MatrixXd values;
  std::vector<std::string> names;
};

struct Bases {
  NamedMatrix G;
  NamedMatrix H;
  NamedMatrix X;
  std::vector<int> d_powers;  // powers kept in G (after duplicate removal)
  std::vector<std::string> warnings;
};

/// Duplicated expansion columns (e.g. the square of a binary instrument) are
/// dropped and reported in `warnings`.
Bases build_bases(const Dataset& ds, const BasisSpec& spec);

/// Second-stage coefficients in the order (intercept, G(D) terms, X terms, v_hat).
struct CfFit {
  VectorXd coef;
  MatrixXd cov;
  std::vector<std::string> names;
  VectorXd v_hat;
  OlsFit first_stage;
  double augmented_tsls_check = 0.0;
  double sigma2 = 0.0;
  std::ptrdiff_t n = 0;
  std::vector<int> d_powers;
  std::vector<std::string> warnings;

  /// Index range of the G(D) block within coef.
  int g_begin() const { return 1; }
  int g_size() const { return static_cast<int>(d_powers.size()); }
};

/// Coefficients in the order (intercept, G(D) terms, X terms).
struct TslsFit {
  VectorXd coef;
  MatrixXd cov;
  std::vector<std::string> names;
  double sigma2 = 0.0;
  std::ptrdiff_t n = 0;
  std::vector<int> d_powers;

  int g_begin() const { return 1; }
  int g_size() const { return static_cast<int>(d_powers.size()); }
};

CfFit cf_fit(const Dataset& ds, const BasisSpec& spec);
TslsFit tsls_fit(const Dataset& ds, const BasisSpec& spec);

/// Generic two-stage least squares: regressors R instrumented by Q (both
/// include any exogenous columns). Homoscedastic covariance with
/// sigma2 = RSS / (n - p).
TslsFit tsls(const MatrixXd& regressors, const MatrixXd& instruments, const VectorXd& y);

enum class PretestChoice { ControlFunction, TSLS };

struct PretestResult {
  double hausman_stat = 0.0;
  double p_value = 1.0;
  PretestChoice chosen = PretestChoice::ControlFunction;
  CfFit cf;
  TslsFit tsls;
  double alpha = 0.05;
};

/// H = d' [Cov_TSLS - Cov_CF]^- d over the G(D) block, df = 1.
double hausman_statistic(const VectorXd& b_cf, const MatrixXd& cov_cf,
                         const VectorXd& b_tsls, const MatrixXd& cov_tsls);

PretestResult hausman_pretest(const Dataset& ds, const BasisSpec& spec, double alpha);

/// G(d1)'beta - G(d2)'beta with SE sqrt(delta' Cov delta).
EffectEstimate causal_effect(const VectorXd& g_coef, const MatrixXd& g_cov,
                             const std::vector<int>& d_powers, double d1, double d2,
                             double alpha, EstimateMethod method);
EffectEstimate causal_effect(const CfFit& fit, double d1, double d2, double alpha = 0.05);
EffectEstimate causal_effect(const TslsFit& fit, double d1, double d2, double alpha = 0.05);

}  // namespace robustiv
