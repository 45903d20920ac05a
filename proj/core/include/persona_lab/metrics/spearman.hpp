#pragma once

#include <span>
#include <vector>

namespace persona_lab::metrics {

/// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Pearson product-moment correlation, clamped to [-1, 1].
/// Throws UndefinedCorrelation if either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Spearman's rho: Pearson correlation of fractional ranks.
/// Throws InvalidArgument on a length mismatch and UndefinedCorrelation for
/// n < 2 or a constant list.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

}  // namespace persona_lab::metrics
