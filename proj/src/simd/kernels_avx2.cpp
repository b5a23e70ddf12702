#include <immintrin.h>

#include <cmath>
#include <limits>

#include "hexcross/simd/kernels.hpp"

namespace hexcross::simd {

namespace {

inline __m256d load_i16(const std::int16_t* p) {
    const __m128i v = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
    return _mm256_cvtepi32_pd(_mm_cvtepi16_epi32(v));
}

void affine_avx2(Columns c, std::size_t count, const Coeffs& k, double* out) {
    const __m256d ln_n = _mm256_set1_pd(k.ln_n);
    const __m256d ln_x = _mm256_set1_pd(k.ln_x);
    const __m256d h = _mm256_set1_pd(k.h);
    const __m256d hp = _mm256_set1_pd(k.half_h_prime);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d e = load_i16(c.e + i);
        __m256d v = _mm256_mul_pd(ln_n, load_i16(c.k + i));
        v = _mm256_fmadd_pd(h, load_i16(c.r + i), v);
        v = _mm256_fmadd_pd(hp, load_i16(c.r_prime + i), v);
        // e == 0 must not produce 0 * -inf.
        const __m256d edge = _mm256_blendv_pd(_mm256_mul_pd(ln_x, e), zero, _mm256_cmp_pd(e, zero, _CMP_EQ_OQ));
        _mm256_storeu_pd(out + i, _mm256_add_pd(v, edge));
    }
    for (; i < count; ++i) {
        double v = k.ln_n * c.k[i] + k.h * c.r[i] + k.half_h_prime * c.r_prime[i];
        if (c.e[i] != 0) v += k.ln_x * c.e[i];
        out[i] = v;
    }
}

double max_avx2(const double* v, std::size_t count) {
    __m256d m = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(v + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double out = lanes[0];
    for (int j = 1; j < 4; ++j)
        if (lanes[j] > out) out = lanes[j];
    for (; i < count; ++i)
        if (v[i] > out) out = v[i];
    return out;
}

// exp for arguments <= 0: x = m ln2 + r with |r| <= ln2/2, Taylor polynomial
// of degree 13 for e^r, then scale by 2^m through the exponent bits.
inline __m256d exp_nonpositive(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d lower = _mm256_set1_pd(-708.0);

    const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
    const __m256d xc = _mm256_max_pd(x, lower);
    const __m256d m = _mm256_round_pd(_mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(m, ln2_hi, xc);
    r = _mm256_fnmadd_pd(m, ln2_lo, r);

    static constexpr double inv_fact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,       1.0 / 120.0,     1.0 / 24.0,
        1.0 / 6.0,          0.5,               1.0,               1.0};
    __m256d p = _mm256_set1_pd(inv_fact[0]);
    for (int j = 1; j < 14; ++j) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[j]));

    const __m128i mi = _mm256_cvtpd_epi32(m);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(mi), _mm256_set1_epi64x(1023)), 52);
    const __m256d out = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_blendv_pd(out, _mm256_setzero_pd(), underflow);
}

void exp_avx2(double* v, std::size_t count, double shift) {
    const __m256d s = _mm256_set1_pd(shift);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) _mm256_storeu_pd(v + i, exp_nonpositive(_mm256_sub_pd(_mm256_loadu_pd(v + i), s)));
    for (; i < count; ++i) v[i] = std::exp(v[i] - shift);
}

double masked_avx2(const double* w, const std::uint64_t* masks, std::size_t count, std::uint64_t require) {
    const __m256i req = _mm256_set1_epi64x(static_cast<long long>(require));
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256i mk = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(masks + i));
        const __m256i hit = _mm256_cmpeq_epi64(_mm256_and_si256(mk, req), req);
        const __m256d x = _mm256_and_pd(_mm256_castsi256_pd(hit), _mm256_loadu_pd(w + i));
        const __m256d t = _mm256_add_pd(acc, x);
        const __m256d big = _mm256_cmp_pd(_mm256_andnot_pd(sign, acc), _mm256_andnot_pd(sign, x), _CMP_GE_OQ);
        const __m256d lo_acc = _mm256_add_pd(_mm256_sub_pd(acc, t), x);
        const __m256d lo_x = _mm256_add_pd(_mm256_sub_pd(x, t), acc);
        comp = _mm256_add_pd(comp, _mm256_blendv_pd(lo_x, lo_acc, big));
        acc = t;
    }
    alignas(32) double lanes[4], lows[4];
    _mm256_store_pd(lanes, acc);
    _mm256_store_pd(lows, comp);
    double s = 0, c = 0;
    auto add = [&](double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    };
    for (int l = 0; l < 4; ++l) add(lanes[l]);
    for (int l = 0; l < 4; ++l) add(lows[l]);
    for (; i < count; ++i)
        if ((masks[i] & require) == require) add(w[i]);
    return s + c;
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable t{"avx2", affine_avx2, max_avx2, exp_avx2, masked_avx2};
    return &t;
}

}  // namespace hexcross::simd
