#include "robustiv/uniform_ci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustiv/parallel.hpp"
#include "robustiv/rng.hpp"
#include "robustiv/simd/grid_scan.hpp"
#include "robustiv/stats.hpp"

namespace robustiv {

std::vector<double> Grid::points() const {
  std::vector<double> out(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) out[i] = at(i);
  return out;
}

void Grid::validate() const {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite with lo < hi");
  if (n_points < 101) throw Error(ErrorCode::InvalidArgument, "grid needs at least 101 points");
}

Grid default_grid(const ReducedForm& rf, const IndexSet& S_hat, int n_points) {
  if (S_hat.empty()) throw Error(ErrorCode::InvalidArgument, "relevant set is empty");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double max_se = 0.0;
  const double n = double(rf.n);
  for (int j : S_hat) {
    const double g = rf.gamma_hat(j);
    const double r = rf.Gamma_hat(j) / g;
    const double var = (rf.V_Gamma(j, j) - 2.0 * r * rf.C(j, j) + r * r * rf.V_gamma(j, j)) / (n * g * g);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    max_se = std::max(max_se, std::sqrt(std::max(var, 0.0)));
  }
  if (!(max_se > 0.0)) max_se = 1e-8 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  return Grid{lo - 5.0 * max_se, hi + 5.0 * max_se, n_points};
}

namespace {

double bonferroni_quantile(double alpha, std::size_t s) {
  return stats::normal_quantile(1.0 - alpha / (2.0 * double(s)));
}

struct RowStore {
  std::vector<double> a, b, va, cab, vb, threshold2;

  simd::ScanRows view() const { return {a, b, va, cab, vb, threshold2}; }
};

// Variance components of Gamma_j - beta gamma_j for j in S_hat, from the
// clipped joint covariance, and the squared thresholds (lambda * rho)^2 / SE^2.
RowStore make_rows(const ReducedForm& rf, const MatrixXd& joint, const IndexSet& S_hat,
                   double alpha, double lambda) {
  const auto p = rf.pz();
  const double n = double(rf.n);
  const double t = lambda * bonferroni_quantile(alpha, S_hat.size());
  RowStore rows;
  for (int j : S_hat) {
    rows.a.push_back(rf.Gamma_hat(j));
    rows.b.push_back(rf.gamma_hat(j));
    rows.va.push_back(joint(j, j) / n);
    rows.cab.push_back(joint(j, p + j) / n);
    rows.vb.push_back(joint(p + j, p + j) / n);
    rows.threshold2.push_back(t * t);
  }
  return rows;
}

IntervalResult hull(const std::vector<unsigned char>& mask, const Grid& grid) {
  IntervalResult out;
  out.grid = grid;
  const auto first = std::find(mask.begin(), mask.end(), 1);
  const auto last = std::find(mask.rbegin(), mask.rend(), 1);
  const int lo = static_cast<int>(first - mask.begin());
  const int hi = static_cast<int>(mask.rend() - last) - 1;
  out.lower = grid.at(lo);
  out.upper = grid.at(hi);
  out.hit_grid_boundary = lo == 0 || hi == grid.n_points - 1;
  return out;
}

}  // namespace

VectorXd pi_threshold(const ReducedForm& rf, const IndexSet& S_hat, double beta, double alpha,
                      double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  const RowStore rows = make_rows(rf, rf.joint_cov(), S_hat, alpha, lambda);
  VectorXd out(S_hat.size());
  for (std::size_t j = 0; j < S_hat.size(); ++j) {
    const double r = rows.a[j] - beta * rows.b[j];
    const double var = rows.va[j] - (beta + beta) * rows.cab[j] + (beta * beta) * rows.vb[j];
    out(j) = (r * r >= rows.threshold2[j] * var) ? r : 0.0;
  }
  return out;
}

IntervalResult searching_ci(const ReducedForm& rf, const IndexSet& S_hat, double alpha,
                            const Grid& grid) {
  grid.validate();
  if (S_hat.empty()) throw Error(ErrorCode::InvalidArgument, "relevant set is empty");
  const RowStore rows = make_rows(rf, rf.joint_cov(), S_hat, alpha, 1.0);
  std::vector<unsigned char> mask(static_cast<std::size_t>(grid.n_points));
  const auto accepted = simd::scan(rows.view(), grid.lo, grid.step(), mask);
  if (accepted == 0)
    throw Error(ErrorCode::EmptySearchSet,
                "no grid point in [" + std::to_string(grid.lo) + ", " + std::to_string(grid.hi) +
                    "] (" + std::to_string(grid.n_points) + " points) leaves a majority of IVs valid");
  IntervalResult out = hull(mask, grid);
  out.method = IntervalMethod::Searching;
  out.accepted = std::move(mask);
  if (out.hit_grid_boundary) out.warnings.push_back("searching set reaches the grid boundary");
  return out;
}

double default_sampling_lambda(std::ptrdiff_t n, int M, std::size_t s_size) {
  return std::pow(std::log(double(n)) / double(M), 1.0 / (2.0 * double(s_size)));
}

IntervalResult sampling_ci(const ReducedForm& rf, const IndexSet& S_hat, double alpha,
                           const SamplingOptions& sopts, const Grid& grid) {
  grid.validate();
  if (S_hat.empty()) throw Error(ErrorCode::InvalidArgument, "relevant set is empty");
  if (sopts.M < 1) throw Error(ErrorCode::InvalidArgument, "M must be at least 1");
  const double lambda = sopts.lambda.value_or(default_sampling_lambda(rf.n, sopts.M, S_hat.size()));
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");

  const MatrixXd joint = rf.joint_cov();
  const RowStore base = make_rows(rf, joint, S_hat, alpha, lambda);

  // Resample only the (Gamma_S, gamma_S) block.
  const auto s = static_cast<Eigen::Index>(S_hat.size());
  const auto p = rf.pz();
  std::vector<Eigen::Index> idx;
  for (int j : S_hat) idx.push_back(j);
  for (int j : S_hat) idx.push_back(p + j);
  MatrixXd block(2 * s, 2 * s);
  for (Eigen::Index a = 0; a < 2 * s; ++a)
    for (Eigen::Index b = 0; b < 2 * s; ++b) block(a, b) = joint(idx[a], idx[b]);
  block *= sopts.noise_scale / double(rf.n);
  MatrixXd chol = MatrixXd::Zero(2 * s, 2 * s);
  if (sopts.noise_scale > 0.0) {
    Eigen::LLT<MatrixXd> llt(block);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::InvalidArgument, "resampling covariance is not positive definite");
    chol = llt.matrixL();
  }

  struct Draw {
    bool nonempty = false;
    double lo = 0.0;
    double hi = 0.0;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(sopts.M));
  parallel_for(draws.size(), [&](std::size_t m) {
    Rng rng(sopts.seed, m);
    VectorXd eps(2 * s);
    for (Eigen::Index a = 0; a < 2 * s; ++a) eps(a) = rng.normal();
    const VectorXd shift = chol * eps;
    RowStore rows = base;
    for (Eigen::Index a = 0; a < s; ++a) {
      rows.a[a] += shift(a);
      rows.b[a] += shift(s + a);
    }
    std::vector<unsigned char> mask(static_cast<std::size_t>(grid.n_points));
    if (simd::scan(rows.view(), grid.lo, grid.step(), mask) == 0) return;
    const IntervalResult h = hull(mask, grid);
    draws[m] = {true, h.lower, h.upper};
  });

  IntervalResult out;
  out.grid = grid;
  out.M = sopts.M;
  out.lambda = lambda;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& d : draws) {
    if (!d.nonempty) continue;
    ++out.nonempty_count;
    lo = std::min(lo, d.lo);
    hi = std::max(hi, d.hi);
  }
  if (out.nonempty_count == 0) {
    IntervalResult fb = searching_ci(rf, S_hat, alpha, grid);
    fb.method = IntervalMethod::Sampling;
    fb.M = sopts.M;
    fb.lambda = lambda;
    fb.fallback_to_searching = true;
    fb.warnings.push_back("every resample gave an empty searching set; reporting the searching interval");
    return fb;
  }
  out.method = IntervalMethod::Sampling;
  out.lower = lo;
  out.upper = hi;
  out.hit_grid_boundary = lo <= grid.lo || hi >= grid.at(grid.n_points - 1);
  if (out.hit_grid_boundary) out.warnings.push_back("sampling interval reaches the grid boundary");
  return out;
}

}  // namespace robustiv
