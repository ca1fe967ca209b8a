#pragma once

#include <cstddef>
#include <span>

namespace dtc {

/// y = intercept + slope * x by ordinary least squares.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Needs at least two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dtc
