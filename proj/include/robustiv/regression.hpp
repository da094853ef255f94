#pragma once

#include <Eigen/Dense>

#include "robustiv/dataset.hpp"

namespace robustiv {

enum class CovarianceType { Classical, Robust };

/// Ordinary least squares fit.
///
/// `cov` is the asymptotic covariance of sqrt(n) (coef - truth): the HC0
/// sandwich n (X'X)^-1 (sum r_i^2 x_i x_i') (X'X)^-1 when robust, otherwise
/// sigma2 * n (X'X)^-1 with sigma2 = RSS / (n - p).
struct OlsFit {
  VectorXd coef;
  VectorXd residuals;
  MatrixXd xtx_inv;  // (X'X / n)^-1
  MatrixXd cov;
  double sigma2 = 0.0;
  CovarianceType cov_type = CovarianceType::Robust;
};

/// Condition number of the column-equilibrated Gram matrix above which a
/// design is treated as rank deficient.
inline constexpr double kMaxConditionNumber = 1e12;

OlsFit ols_fit(const MatrixXd& design, const VectorXd& y,
               CovarianceType type = CovarianceType::Robust);

/// Equilibrated condition number of X'X; throws RankDeficient above the
/// threshold and DimensionMismatch when n <= p.
double check_full_rank(const MatrixXd& design);

/// Cross sandwich n (X'X)^-1 (sum r1_i r2_i x_i x_i') (X'X)^-1 given
/// xtx_inv = (X'X / n)^-1.
MatrixXd sandwich(const MatrixXd& design, const MatrixXd& xtx_inv,
                  const VectorXd& r1, const VectorXd& r2);

/// Joint reduced-form estimates from regressing Y and D on W = (Z, X, 1).
struct ReducedForm {
  VectorXd Gamma_hat;  // Y on Z
  VectorXd gamma_hat;  // D on Z
  MatrixXd V_Gamma;
  MatrixXd V_gamma;
  MatrixXd C;
  std::ptrdiff_t n = 0;
  MatrixXd Sigma_W;  // (1/n) W'W
  VectorXd xi_hat;
  VectorXd delta_hat;

  std::ptrdiff_t pz() const { return Gamma_hat.size(); }

  /// [[V_Gamma, C], [C', V_gamma]] symmetrized with eigenvalues clipped
  /// from below at 1e-12.
  MatrixXd joint_cov() const;
};

ReducedForm reduced_form_fit(const Dataset& ds);

/// Symmetrize and clip eigenvalues below `floor`.
MatrixXd clip_psd(const MatrixXd& m, double floor = 1e-12);

struct ProbitFit {
  VectorXd coef;
  MatrixXd cov;  // inverse of the negative Hessian at coef
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ProbitControl {
  int max_iterations = 100;
  int max_halvings = 30;
  double gradient_tolerance = 1e-8;  // on max |score| / n
};

/// Probit maximum likelihood by Newton-Raphson with step halving, started
/// at zero. Throws OneClassOnly when y has a single class and NotConverged
/// when the iteration limit or the line search is exhausted or the linear
/// predictor diverges (separation).
ProbitFit probit_fit(const MatrixXd& design, const VectorXd& y,
                     const ProbitControl& control = {});

/// Log-likelihood, score and Hessian of the probit model at `coef`.
double probit_loglik(const MatrixXd& design, const VectorXd& y, const VectorXd& coef);
VectorXd probit_score(const MatrixXd& design, const VectorXd& y, const VectorXd& coef);
MatrixXd probit_hessian(const MatrixXd& design, const VectorXd& y, const VectorXd& coef);

}  // namespace robustiv
