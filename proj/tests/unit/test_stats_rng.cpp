#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "robustiv/parallel.hpp"
#include "robustiv/rng.hpp"
#include "robustiv/stats.hpp"

using namespace robustiv;

TEST_CASE("normal distribution functions") {
  for (double x : {-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0})
    CHECK(stats::normal_cdf(x) == doctest::Approx(oracle::phi_cdf(x)).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0));
  for (double p : {1e-10, 0.01, 0.3, 0.9, 0.999999})
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK(stats::chi2_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("Mills ratio and log cdf stay finite in the far tail") {
  for (double x : {-5.0, -20.0, -35.0, -100.0, -1e4}) {
    const double m = stats::mills_ratio(x);
    CHECK(std::isfinite(m));
    // phi(x) / Phi(x) ~ -x for very negative x.
    CHECK(m == doctest::Approx(-x).epsilon(x < -30 ? 1e-3 : 0.2));
    CHECK(std::isfinite(stats::log_normal_cdf(x)));
  }
  for (double x : {-3.0, -1.0, 0.0, 2.0})
    CHECK(stats::mills_ratio(x) ==
          doctest::Approx(std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI) / oracle::phi_cdf(x)).epsilon(1e-10));
}

TEST_CASE("type-7 quantiles and moments") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(stats::median(v) == 2.5);
  CHECK(stats::quantile(v, 0.0) == 1.0);
  CHECK(stats::quantile(v, 1.0) == 4.0);
  CHECK(stats::quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(stats::mean(v) == 2.5);
  CHECK(stats::stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stats::median(std::vector<double>{5.0, 1.0, 3.0}) == 3.0);
}

TEST_CASE("rng is reproducible and streams differ") {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);

  Rng r(7);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[r.below(7)];
  for (int c7 : counts) CHECK(std::abs(c7 - 10000) < 500);
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
                    if (i == 17) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(3);
  CHECK(thread_count() == 3);
  set_thread_count(0);
}
