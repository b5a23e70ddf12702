#include <cstdlib>
#include <cstring>

#include "hexcross/simd/kernels.hpp"

namespace hexcross::simd {

#ifndef HEXCROSS_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

const KernelTable& select() {
    const char* env = std::getenv("HEXCROSS_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
#if defined(__x86_64__) || defined(__i386__)
    if (const KernelTable* t = avx2_kernels()) {
        __builtin_cpu_init();
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return *t;
    }
#endif
    return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() {
    static const KernelTable& t = select();
    return t;
}

}  // namespace hexcross::simd
