#include "robustiv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "robustiv/error.hpp"

namespace robustiv::stats {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double mills_ratio(double x) {
  if (x > -30.0) return normal_pdf(x) / normal_cdf(x);
  // Continued fraction tail of Phi(x) / phi(x) for large negative x.
  const double t = -x;
  double cf = t;
  for (int k = 40; k >= 1; --k) cf = t + k / cf;
  return cf;
}

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(mills_ratio(x));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

double quantile(std::span<const double> values, double prob) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = (double(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return values.empty() ? 0.0 : s / double(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(values.size() - 1));
}

}  // namespace robustiv::stats
