#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "robustiv/control_function.hpp"
#include "robustiv/rng.hpp"
#include "robustiv/simulate.hpp"

using namespace robustiv;

namespace {

// Nonlinear outcome with a confounded treatment and k instruments.
Dataset quadratic_data(std::ptrdiff_t n, int pz, int px, double endog, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.y.resize(n);
  ds.d.resize(n);
  ds.z.resize(n, pz);
  ds.x.resize(n, px);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double lin = 0.0;
    for (int j = 0; j < pz; ++j) {
      ds.z(i, j) = rng.normal();
      lin += 0.6 * ds.z(i, j) + 0.2 * ds.z(i, j) * ds.z(i, j);
    }
    double xs = 0.0;
    for (int k = 0; k < px; ++k) {
      ds.x(i, k) = rng.normal();
      xs += 0.3 * ds.x(i, k);
    }
    const double e1 = rng.normal(), e2 = rng.normal();
    const double v = e1;
    const double u = endog * e1 + std::sqrt(1.0 - endog * endog) * e2;
    ds.d(i) = 1.0 + lin + xs + v;
    ds.y(i) = 0.5 + 0.8 * ds.d(i) - 0.1 * ds.d(i) * ds.d(i) + xs + u;
  }
  return validate_dataset(std::move(ds));
}

}  // namespace

TEST_CASE("Mroz control-function fit matches reference coefficients") {
  const Dataset ds = oracle::mroz_linear();
  REQUIRE(ds.n() == 428);
  const Bases b = build_bases(ds, {});
  CHECK(b.H.values.cols() == 6);
  CHECK(b.G.names == std::vector<std::string>{"D", "I(D^2)"});
  const CfFit fit = cf_fit(ds, {});
  CHECK(fit.names.front() == "(Intercept)");
  CHECK(fit.coef(0) == doctest::Approx(1.2573907).epsilon(1e-6));
  CHECK(std::abs(fit.coef(1) - -0.1434395) < 1e-6);
  CHECK(std::abs(fit.coef(2) - 0.0086426) < 1e-6);
  CHECK(std::abs(std::sqrt(fit.cov(1, 1)) - 0.1102058) < 1e-6);
  CHECK(std::abs(std::sqrt(fit.cov(2, 2)) - 0.0041004) < 1e-6);
  CHECK(std::abs(fit.coef(3) - 0.0438690) < 1e-6);
  CHECK(std::abs(std::sqrt(fit.cov(3, 3)) - 0.0131574) < 1e-6);
  CHECK(fit.augmented_tsls_check < 1e-8);

  const double d2 = oracle::median(ds.d);
  const EffectEstimate ce = causal_effect(fit, d2 + 1.0, d2);
  CHECK(std::abs(ce.beta_hat - 0.07263) < 1e-4);
  CHECK(std::abs(ce.se - 0.02171) < 1e-4);
  CHECK(std::abs(ce.lower - 0.03007) < 1e-4);
  CHECK(std::abs(ce.upper - 0.1152) < 1e-4);

  const PretestResult pre = hausman_pretest(ds, {}, 0.05);
  CHECK(pre.chosen == PretestChoice::ControlFunction);
  CHECK(pre.hausman_stat >= 0.0);
}

TEST_CASE("squares of binary instruments are dropped with a warning") {
  Dataset ds = quadratic_data(300, 2, 1, 0.3, 21);
  for (Eigen::Index i = 0; i < ds.n(); ++i) ds.z(i, 1) = ds.z(i, 1) > 0 ? 1.0 : 0.0;
  const Bases b = build_bases(ds, {});
  CHECK(b.H.values.cols() == 3);
  REQUIRE(b.warnings.size() == 1);
  CHECK(b.warnings[0].find("I(Z2^2)") != std::string::npos);
  CHECK_NOTHROW(cf_fit(ds, {}));
}

TEST_CASE("control function equals direct OLS on (R, v_hat)") {
  for (int r = 0; r < 20; ++r) {
    const Dataset ds = quadratic_data(200 + 10 * r, 1 + r % 3, r % 3, 0.5, 100 + r);
    const CfFit fit = cf_fit(ds, {});
    CHECK(fit.augmented_tsls_check < 1e-8);
    const Bases b = build_bases(ds, {});
    MatrixXd design(ds.n(), 1 + b.G.values.cols() + b.X.values.cols() + 1);
    design << VectorXd::Ones(ds.n()), b.G.values, b.X.values, fit.v_hat;
    const auto direct = oracle::least_squares(design, ds.y);
    for (std::size_t k = 0; k < direct.size(); ++k)
      CHECK(fit.coef(static_cast<Eigen::Index>(k)) ==
            doctest::Approx(direct[k]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("just-identified TSLS is the Wald ratio") {
  const LinearSim sim = gen_linear_iv(default_linear_config(500, 1, 0, 0, 0.5, 22));
  const Dataset& ds = sim.data;
  MatrixXd r(ds.n(), 2), q(ds.n(), 2);
  r << VectorXd::Ones(ds.n()), ds.d;
  q << VectorXd::Ones(ds.n()), ds.z.col(0);
  const TslsFit fit = tsls(r, q, ds.y);
  const VectorXd zc = ds.z.col(0).array() - ds.z.col(0).mean();
  const double wald = zc.dot(ds.y) / zc.dot(ds.d);
  CHECK(fit.coef(1) == doctest::Approx(wald).epsilon(1e-10));
  CHECK_THROWS_AS(tsls(MatrixXd::Ones(ds.n(), 3), q, ds.y), Error);
}

TEST_CASE("Hausman statistic properties") {
  SUBCASE("identical estimates give zero") {
    const Eigen::Matrix2d a = (Eigen::Matrix2d() << 2, 0.3, 0.3, 1).finished();
    const Eigen::Vector2d b(0.5, -1);
    CHECK(hausman_statistic(b, a, b, 2 * a) == 0.0);
  }
  SUBCASE("hand-computed diagonal case") {
    const Eigen::Vector2d b1(1.0, 2.0), b2(0.0, 0.0);
    const Eigen::Matrix2d c1 = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d c2 = (Eigen::Matrix2d() << 3, 0, 0, 5).finished();
    CHECK(hausman_statistic(b1, c1, b2, c2) == doctest::Approx(1.0 / 2.0 + 4.0 / 4.0));
  }
  SUBCASE("nonnegative and invariant to rescaling the outcome") {
    for (int r = 0; r < 10; ++r) {
      Dataset ds = quadratic_data(400, 2, 1, 0.4, 200 + r);
      const PretestResult a = hausman_pretest(ds, {}, 0.05);
      CHECK(a.hausman_stat >= 0.0);
      CHECK(a.p_value >= 0.0);
      CHECK(a.p_value <= 1.0);
      ds.y *= 7.5;
      const PretestResult b = hausman_pretest(ds, {}, 0.05);
      CHECK(b.hausman_stat == doctest::Approx(a.hausman_stat).epsilon(1e-6));
    }
  }
}

TEST_CASE("causal effect identities") {
  const Dataset ds = quadratic_data(500, 2, 1, 0.4, 23);
  const CfFit fit = cf_fit(ds, {});
  for (double d1 : {-1.0, 0.5, 3.0}) {
    for (double d2 : {0.0, 2.0}) {
      const auto a = causal_effect(fit, d1, d2);
      const auto b = causal_effect(fit, d2, d1);
      CHECK(a.beta_hat == doctest::Approx(-b.beta_hat));
      CHECK(a.se == doctest::Approx(b.se));
    }
    const auto z = causal_effect(fit, d1, d1);
    CHECK(z.beta_hat == 0.0);
    CHECK(z.se == 0.0);
  }
  BasisSpec lin;
  lin.d_powers = {1};
  const CfFit lf = cf_fit(ds, lin);
  const auto e = causal_effect(lf, 2.5, 1.0);
  CHECK(e.beta_hat == doctest::Approx(1.5 * lf.coef(1)));
  CHECK(e.se == doctest::Approx(1.5 * std::sqrt(lf.cov(1, 1))));
}

TEST_CASE("CF recovers the structural curve and beats TSLS in precision") {
  const Dataset ds = quadratic_data(4000, 2, 1, 0.5, 24);
  const CfFit cf = cf_fit(ds, {});
  const TslsFit ts = tsls_fit(ds, {});
  CHECK(cf.coef(1) == doctest::Approx(0.8).epsilon(0.1));
  CHECK(cf.coef(2) == doctest::Approx(-0.1).epsilon(0.15));
  CHECK(cf.cov(1, 1) <= ts.cov(1, 1));
  // Under the model the two estimators agree up to sampling noise.
  CHECK(std::abs(cf.coef(1) - ts.coef(1)) < 4.0 * std::sqrt(ts.cov(1, 1)));
}

TEST_CASE("v_hat t statistic has the nominal size without confounding") {
  int rejections = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const Dataset ds = quadratic_data(300, 2, 1, 0.0, 3000 + r);
    const CfFit fit = cf_fit(ds, {});
    const auto k = fit.coef.size() - 1;
    rejections += std::abs(fit.coef(k) / std::sqrt(fit.cov(k, k))) > 1.96;
  }
  CHECK(rejections <= 13);
}

TEST_CASE("basis validation") {
  BasisSpec s;
  s.d_powers = {2};
  CHECK_THROWS_AS(s.validate(), Error);
  s.d_powers = {1, 1};
  CHECK_THROWS_AS(s.validate(), Error);
  s.d_powers = {1, 3};
  CHECK_NOTHROW(s.validate());
}
