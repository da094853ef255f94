#pragma once

#include <span>

namespace robustiv::stats {

double normal_pdf(double x);
double normal_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);
/// phi(x) / Phi(x), the inverse Mills ratio, stable for very negative x.
double mills_ratio(double x);
double normal_quantile(double p);
/// P(chi^2_df >= x).
double chi2_sf(double x, double df);

/// Sample quantile with linear interpolation between order statistics
/// (the "type 7" definition). The input is copied and sorted.
double quantile(std::span<const double> values, double prob);
double median(std::span<const double> values);
double mean(std::span<const double> values);
/// Sample standard deviation with n - 1 denominator.
double stddev(std::span<const double> values);

}  // namespace robustiv::stats
