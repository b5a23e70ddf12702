#include "hexcross/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hexcross {

bool ModelParams::is_fkg_regime() const {
    return n >= 1.0 && n * x * x <= std::exp(-std::abs(h_prime));
}

std::string ModelParams::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << " x=" << x << " h=" << h << " h'=" << h_prime;
    return os.str();
}

LogCoeffs LogCoeffs::from(const ModelParams& p) {
    if (!(p.n > 0)) throw std::domain_error("loop fugacity n must be positive");
    if (!(p.x >= 0)) throw std::domain_error("edge weight x must be non-negative");
    return {std::log(p.n), p.x == 0 ? kNegInf : std::log(p.x), p.h, 0.5 * p.h_prime};
}

double log_weight(const SpinStats& s, const LogCoeffs& c) {
    double edge = 0;
    if (s.e != 0) {
        if (c.ln_x == kNegInf) return kNegInf;
        edge = c.ln_x * static_cast<double>(s.e);
    }
    return c.ln_n * static_cast<double>(s.k) + edge + c.h * static_cast<double>(s.r) +
           c.half_h_prime * static_cast<double>(s.r_prime);
}

double log_weight(const SpinStats& s, const ModelParams& p) { return log_weight(s, LogCoeffs::from(p)); }

double nienhuis_xc(double n) {
    if (!(n >= 0.0 && n <= 2.0)) throw std::domain_error("nienhuis_xc defined for n in [0, 2]");
    return 1.0 / std::sqrt(2.0 + std::sqrt(2.0 - n));
}

double homeomorphism_f(double c0, double v) {
    if (!(c0 > 0)) throw std::domain_error("homeomorphism_f needs c0 > 0");
    const double a = std::pow(c0, -c0);
    return 1.0 - a + a * v;
}

}  // namespace hexcross
