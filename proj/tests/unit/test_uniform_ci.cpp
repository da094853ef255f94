#include <cmath>

#include "doctest.h"
#include "robustiv/simulate.hpp"
#include "robustiv/stats.hpp"
#include "robustiv/uniform_ci.hpp"

using namespace robustiv;

namespace {

ReducedForm diag_rf(const VectorXd& Gamma, const VectorXd& gamma, double v, std::ptrdiff_t n) {
  ReducedForm rf;
  const auto p = Gamma.size();
  rf.Gamma_hat = Gamma;
  rf.gamma_hat = gamma;
  rf.V_Gamma = v * MatrixXd::Identity(p, p);
  rf.V_gamma = v * MatrixXd::Identity(p, p);
  rf.C = MatrixXd::Zero(p, p);
  rf.n = n;
  rf.Sigma_W = MatrixXd::Identity(p + 1, p + 1);
  return rf;
}

IndexSet all(int p) {
  IndexSet s;
  for (int j = 0; j < p; ++j) s.push_back(j);
  return s;
}

}  // namespace

TEST_CASE("thresholded pi by hand") {
  const ReducedForm rf = diag_rf((VectorXd(2) << 1, 2).finished(), VectorXd::Ones(2), 1.0, 100);
  const VectorXd pi = pi_threshold(rf, {0, 1}, 1.0, 0.05);
  CHECK(pi(0) == 0.0);
  CHECK(pi(1) == 1.0);
  const double rho = stats::normal_quantile(1 - 0.05 / 4) * std::sqrt(2.0 / 100.0);
  CHECK(rho == doctest::Approx(0.3170).epsilon(1e-3));
  // Residual 0.3 for IV 2 sits just under its threshold at beta = 1.
  const ReducedForm near = diag_rf((VectorXd(2) << 1, 1.3).finished(), VectorXd::Ones(2), 1.0, 100);
  CHECK(pi_threshold(near, {0, 1}, 1.0, 0.05)(1) == 0.0);
  const ReducedForm far = diag_rf((VectorXd(2) << 1, 1.33).finished(), VectorXd::Ones(2), 1.0, 100);
  CHECK(pi_threshold(far, {0, 1}, 1.0, 0.05)(1) == doctest::Approx(0.33));
}

TEST_CASE("proportional reduced form gives exact zeros and a covering interval") {
  const VectorXd g = (VectorXd(4) << 1.0, 0.5, 2.0, 1.5).finished();
  const ReducedForm rf = diag_rf(0.7 * g, g, 0.5, 400);
  CHECK(pi_threshold(rf, all(4), 0.7, 0.05).isZero(0.0));
  const Grid grid = default_grid(rf, all(4), 2001);
  const IntervalResult ci = searching_ci(rf, all(4), 0.05, grid);
  CHECK(ci.lower <= 0.7);
  CHECK(ci.upper >= 0.7);
}

TEST_CASE("a huge lambda thresholds everything to zero") {
  const ReducedForm rf = diag_rf((VectorXd(3) << 1, 5, -2).finished(), VectorXd::Ones(3), 1.0, 100);
  for (double beta : {-10.0, 0.0, 3.0})
    CHECK(pi_threshold(rf, all(3), beta, 0.05, 1e8).isZero(0.0));
}

TEST_CASE("grid validation and empty search set") {
  CHECK_THROWS_AS((Grid{1.0, 0.0, 200}.validate()), Error);
  CHECK_THROWS_AS((Grid{0.0, 1.0, 100}.validate()), Error);
  const ReducedForm rf = diag_rf((VectorXd(3) << 1, 1, 1).finished(), VectorXd::Ones(3), 0.01, 1000);
  try {
    searching_ci(rf, all(3), 0.05, Grid{50.0, 60.0, 201});
    FAIL("expected EmptySearchSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySearchSet);
  }
}

TEST_CASE("grid step reproduces its endpoints") {
  const Grid g{-1.3, 2.9, 4001};
  CHECK(g.at(0) == -1.3);
  CHECK(g.at(4000) == doctest::Approx(2.9).epsilon(1e-15));
  CHECK(g.points().size() == 4001);
}

TEST_CASE("sampling with zero noise equals searching") {
  const LinearSim sim = gen_linear_iv(default_linear_config(1000, 8, 1, 2, 0.5, 61));
  const ReducedForm rf = reduced_form_fit(sim.data);
  const IndexSet s = select_relevant(rf, std::sqrt(std::log(1000.0)));
  const Grid grid = default_grid(rf, s, 2001);
  SamplingOptions so;
  so.M = 1;
  so.lambda = 1.0;
  so.noise_scale = 0.0;
  const IntervalResult a = searching_ci(rf, s, 0.05, grid);
  const IntervalResult b = sampling_ci(rf, s, 0.05, so, grid);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(b.nonempty_count == 1);
}

TEST_CASE("searching intervals nest in alpha") {
  for (int r = 0; r < 10; ++r) {
    const LinearSim sim = gen_linear_iv(default_linear_config(600, 8, 1, 2, 0.5, 70 + r));
    const ReducedForm rf = reduced_form_fit(sim.data);
    const IndexSet s = select_relevant(rf, std::sqrt(std::log(600.0)));
    const Grid grid = default_grid(rf, s, 2001);
    const IntervalResult wide = searching_ci(rf, s, 0.01, grid);
    const IntervalResult narrow = searching_ci(rf, s, 0.10, grid);
    CHECK(wide.lower <= narrow.lower);
    CHECK(wide.upper >= narrow.upper);
    for (std::size_t i = 0; i < wide.accepted.size(); ++i)
      if (narrow.accepted[i]) CHECK(wide.accepted[i]);
  }
}

TEST_CASE("sampling interval properties") {
  const LinearSim sim = gen_linear_iv(default_linear_config(1000, 10, 0, 3, 0.5, 81));
  const ReducedForm rf = reduced_form_fit(sim.data);
  const IndexSet s = select_relevant(rf, std::sqrt(std::log(1000.0)));
  const Grid grid = default_grid(rf, s, 2001);
  SamplingOptions so;
  so.M = 200;
  so.seed = 5;
  const IntervalResult a = sampling_ci(rf, s, 0.05, so, grid);
  const IntervalResult b = sampling_ci(rf, s, 0.05, so, grid);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(a.nonempty_count == b.nonempty_count);
  CHECK(a.nonempty_count <= so.M);
  CHECK(a.nonempty_count > 0);
  CHECK(a.lower <= a.upper);
  CHECK(a.lambda == doctest::Approx(default_sampling_lambda(1000, 200, s.size())));
  CHECK(a.lambda == doctest::Approx(std::pow(std::log(1000.0) / 200.0, 1.0 / (2.0 * double(s.size())))));
  // Endpoints are grid points, which is where resample hulls live.
  const double il = (a.lower - grid.lo) / grid.step();
  CHECK(std::abs(il - std::round(il)) < 1e-6);
  so.seed = 6;
  const IntervalResult c = sampling_ci(rf, s, 0.05, so, grid);
  CHECK((c.lower != a.lower || c.upper != a.upper));
}

TEST_CASE("sampling falls back to searching when every resample is empty") {
  const LinearSim sim = gen_linear_iv(default_linear_config(1000, 6, 0, 0, 0.5, 91));
  const ReducedForm rf = reduced_form_fit(sim.data);
  const IndexSet s = select_relevant(rf, 2.0);
  const Grid grid = default_grid(rf, s, 1001);
  SamplingOptions so;
  so.M = 20;
  so.lambda = 1e-9;
  const IntervalResult r = sampling_ci(rf, s, 0.05, so, grid);
  CHECK(r.fallback_to_searching);
  CHECK(r.nonempty_count == 0);
  CHECK_FALSE(r.warnings.empty());
  const IntervalResult ref = searching_ci(rf, s, 0.05, grid);
  CHECK(r.lower == ref.lower);
  CHECK(r.upper == ref.upper);
}

TEST_CASE("intervals touching the grid edge carry a warning") {
  const LinearSim sim = gen_linear_iv(default_linear_config(1000, 6, 0, 0, 0.5, 92));
  const ReducedForm rf = reduced_form_fit(sim.data);
  const IndexSet s = select_relevant(rf, 2.0);
  const IntervalResult r = searching_ci(rf, s, 0.05, Grid{0.999, 1.001, 201});
  CHECK(r.hit_grid_boundary);
  CHECK_FALSE(r.warnings.empty());
}
