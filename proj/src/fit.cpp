#include "hexcross/fit.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexcross {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_line needs at least two paired points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line needs distinct x values");

    LinearFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double sse = std::max(0.0, syy - f.slope * sxy);
    f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    if (n > 2) {
        f.slope_se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
        if (f.slope_se > 0) {
            boost::math::students_t dist(static_cast<double>(n - 2));
            f.p_negative = boost::math::cdf(dist, f.slope / f.slope_se);
        } else {
            f.p_negative = f.slope < 0 ? 0.0 : 1.0;
        }
    } else {
        f.p_negative = f.slope < 0 ? 0.0 : 1.0;
    }
    return f;
}

}  // namespace hexcross
