#pragma once

#include <cstdint>
#include <vector>

#include "robustiv/dataset.hpp"

namespace robustiv {

/// Linear structural model
///   D = 0.5 + Z gamma + X psi + delta
///   Y = -0.5 + D beta + Z pi + X phi + epsilon
/// with standard normal Z, X and (epsilon, delta) bivariate normal with unit
/// variances and correlation err_corr.
struct LinearSimConfig {
  std::ptrdiff_t n = 500;
  int pz = 10;
  int px = 0;
  double beta = 1.0;
  VectorXd gamma;  // length pz
  VectorXd pi;     // length pz
  VectorXd phi;    // length px
  VectorXd psi;    // length px
  double err_corr = 0.0;
  /// Multiplies epsilon by sqrt((1 + Z1^2) / 2).
  bool heteroscedastic = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Desk-scale version of the high-dimensional endogeneity example: gamma = 1
/// on every IV, pi = 1 on the first n_invalid, phi_k = k/px + 0.5,
/// psi_k = k/px + 1.
LinearSimConfig default_linear_config(std::ptrdiff_t n, int pz, int px, int n_invalid,
                                      double err_corr, std::uint64_t seed);

struct LinearTruth {
  double beta = 0.0;
  VectorXd gamma;
  VectorXd pi;
  double sigma12 = 0.0;  // Cov(epsilon, delta)
  std::vector<int> valid;
  std::vector<int> invalid;
  VectorXd epsilon;
  VectorXd delta;
};

struct LinearSim {
  Dataset data;
  LinearTruth truth;
};

LinearSim gen_linear_iv(const LinearSimConfig& cfg);

/// Binary-outcome model
///   D = d_intercept + Z gamma_z + X gamma_x + v
///   Y = 1{ D beta + y_intercept + Z kappa_z + X kappa_x + u > 0 }
/// with (u, v) bivariate normal, zero means, SDs sigma_u, sigma_v and
/// correlation err_corr, Z and X standard normal.
struct ProbitSimConfig {
  std::ptrdiff_t n = 1000;
  int pz = 5;
  int px = 1;
  double beta = 0.5;
  VectorXd gamma_z;
  VectorXd gamma_x;
  VectorXd kappa_z;
  VectorXd kappa_x;
  double d_intercept = 0.0;
  double y_intercept = 0.0;
  double sigma_u = 1.0;
  double sigma_v = 1.0;
  double err_corr = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ProbitTruth {
  /// kappa over W = (Z, X, 1) in unscaled units.
  VectorXd kappa_w;
  VectorXd gamma_w;
  double beta = 0.0;
  /// beta / sigma_e, the scale the probit control function recovers.
  double beta_star = 0.0;
  double sigma_e = 0.0;
  double rho = 0.0;  // u = rho v + e
};

struct ProbitSim {
  Dataset data;
  ProbitTruth truth;
};

ProbitSim gen_probit_iv(const ProbitSimConfig& cfg);

/// P(Y = 1 | do(D = d), W = w) averaged over the error law, computed by
/// Gauss-Hermite quadrature over v of Phi((d beta + w'kappa + rho v) / sigma_e).
double probit_structural_mean(const ProbitSimConfig& cfg, double d, const VectorXd& w0,
                              int nodes = 64);

/// True CATE(d1, d2 | w0) for w0 of length pz + px.
double probit_true_cate(const ProbitSimConfig& cfg, double d1, double d2, const VectorXd& w0,
                        int nodes = 64);

/// Nodes and weights for integrals of f(x) exp(-x^2), by the Golub-Welsch
/// eigenvalue method.
void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w);

}  // namespace robustiv
