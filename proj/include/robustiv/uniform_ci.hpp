#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustiv/regression.hpp"
#include "robustiv/tsht.hpp"

namespace robustiv {

struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int n_points = 4001;

  double step() const { return (hi - lo) / double(n_points - 1); }
  double at(int i) const { return lo + step() * double(i); }
  std::vector<double> points() const;
  void validate() const;
};

/// Bounds [min_j r_j - 5 s, max_j r_j + 5 s] where r_j = Gamma_j / gamma_j
/// over S_hat and s is the largest delta-method SE among the ratios.
Grid default_grid(const ReducedForm& rf, const IndexSet& S_hat, int n_points = 4001);

/// Thresholded pi over S_hat at a single beta (positions follow S_hat).
VectorXd pi_threshold(const ReducedForm& rf, const IndexSet& S_hat, double beta,
                      double alpha, double lambda = 1.0);

enum class IntervalMethod { Searching, Sampling };

struct IntervalResult {
  double lower = 0.0;
  double upper = 0.0;
  IntervalMethod method = IntervalMethod::Searching;
  Grid grid;
  int M = 0;
  double lambda = 1.0;
  int nonempty_count = 0;
  std::vector<unsigned char> accepted;  // searching mask over the grid
  bool fallback_to_searching = false;
  bool hit_grid_boundary = false;
  std::vector<std::string> warnings;
};

/// Throws EmptySearchSet when no grid point is accepted.
IntervalResult searching_ci(const ReducedForm& rf, const IndexSet& S_hat, double alpha,
                            const Grid& grid);

struct SamplingOptions {
  int M = 1000;
  std::optional<double> lambda;  // default (log n / M)^(1 / (2 |S_hat|))
  std::uint64_t seed = 0;
  /// Multiplies the resampling covariance. Only for testing the degenerate
  /// case; 0 makes every draw equal to the point estimate.
  double noise_scale = 1.0;
};

IntervalResult sampling_ci(const ReducedForm& rf, const IndexSet& S_hat, double alpha,
                           const SamplingOptions& sopts, const Grid& grid);

double default_sampling_lambda(std::ptrdiff_t n, int M, std::size_t s_size);

}  // namespace robustiv
