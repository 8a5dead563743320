#pragma once

#include <limits>

namespace gbh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Standard normal density.
double phi(double x);

/// Standard normal CDF. Accepts +/-inf.
double norm_cdf(double x);

/// 1 - norm_cdf(x) without cancellation in the upper tail.
double norm_sf(double x);

/// log(1 - norm_cdf(x)); finite for every finite x.
double log_norm_sf(double x);

/// Inverse of norm_cdf. Returns -inf at 0 and +inf at 1; throws
/// std::domain_error for p outside [0, 1] or NaN.
double norm_quantile(double p);

/// Lower bound 2 phi(x) / (sqrt(4 + x^2) + x) on the upper tail, valid for
/// x >= 0 (strictly below norm_sf). Throws std::domain_error for x < 0.
double tail_lower_bound(double x);

}  // namespace gbh
