#include <cmath>
#include <limits>

#include "hexcross/simd/kernels.hpp"

namespace hexcross::simd {

namespace {

void affine_scalar(Columns c, std::size_t count, const Coeffs& k, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
        double v = k.ln_n * c.k[i] + k.h * c.r[i] + k.half_h_prime * c.r_prime[i];
        if (c.e[i] != 0) v += k.ln_x * c.e[i];
        out[i] = v;
    }
}

double max_scalar(const double* v, std::size_t count) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i)
        if (v[i] > m) m = v[i];
    return m;
}

void exp_scalar(double* v, std::size_t count, double shift) {
    for (std::size_t i = 0; i < count; ++i) v[i] = std::exp(v[i] - shift);
}

double masked_scalar(const double* w, const std::uint64_t* masks, std::size_t count, std::uint64_t require) {
    // Neumaier compensation; the tables run to millions of rows.
    double s = 0, c = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if ((masks[i] & require) != require) continue;
        const double t = s + w[i];
        c += std::abs(s) >= std::abs(w[i]) ? (s - t) + w[i] : (w[i] - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable t{"scalar", affine_scalar, max_scalar, exp_scalar, masked_scalar};
    return t;
}

}  // namespace hexcross::simd
