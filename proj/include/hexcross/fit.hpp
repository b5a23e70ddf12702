#pragma once

#include <span>

namespace hexcross {

// Ordinary least squares y = a + b x.
struct LinearFit {
    double intercept = 0;
    double slope = 0;
    double slope_se = 0;
    double r_squared = 0;
    // One-sided p-value for slope < 0 (Student t, n - 2 degrees of freedom).
    double p_negative = 1;
    int points = 0;
};

// Throws std::invalid_argument for fewer than two points or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hexcross
