#pragma once

#include <cstddef>
#include <cstdint>

// Column kernels used by exact enumeration. Each entry point has a scalar
// reference and an AVX2 variant; the table is chosen once at startup.
namespace hexcross::simd {

struct Coeffs {
    double ln_n = 0;
    double ln_x = 0;  // may be -inf
    double h = 0;
    double half_h_prime = 0;
};

struct Columns {
    const std::int16_t* k = nullptr;
    const std::int16_t* e = nullptr;
    const std::int16_t* r = nullptr;
    const std::int16_t* r_prime = nullptr;
};

struct KernelTable {
    const char* name;
    // out[i] = k ln n + e ln x + h r + h'/2 r'; e == 0 contributes 0 even when ln x = -inf.
    void (*affine_log_weights)(Columns cols, std::size_t count, const Coeffs& c, double* out);
    // Largest element; -inf for an empty range.
    double (*max_value)(const double* v, std::size_t count);
    // v[i] = exp(v[i] - shift) in place; -inf maps to 0.
    void (*exp_shifted)(double* v, std::size_t count, double shift);
    // Sum of w[i] over rows with (masks[i] & require) == require.
    double (*masked_sum)(const double* w, const std::uint64_t* masks, std::size_t count, std::uint64_t require);
};

const KernelTable& scalar_kernels();
// nullptr when not compiled in.
const KernelTable* avx2_kernels();

// Active table: AVX2 when built and supported by the CPU, unless
// HEXCROSS_SIMD=scalar is set in the environment.
const KernelTable& kernels();

}  // namespace hexcross::simd
