#include "destab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace destab::f2 {

void xor_rows_scalar(Word* dst, const Word* src, std::size_t nwords) {
    for (std::size_t i = 0; i < nwords; ++i) dst[i] ^= src[i];
}

#if defined(__x86_64__) || defined(_M_X64)
__attribute__((target("avx2"))) void xor_rows_avx2(Word* dst, const Word* src, std::size_t nwords) {
    std::size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(a, b));
    }
    for (; i < nwords; ++i) dst[i] ^= src[i];
}
#endif

#if defined(__aarch64__)
void xor_rows_neon(Word* dst, const Word* src, std::size_t nwords) {
    std::size_t i = 0;
    for (; i + 2 <= nwords; i += 2) {
        uint64x2_t a = vld1q_u64(dst + i);
        uint64x2_t b = vld1q_u64(src + i);
        vst1q_u64(dst + i, veorq_u64(a, b));
    }
    for (; i < nwords; ++i) dst[i] ^= src[i];
}
#endif

namespace {

struct Selected {
    XorRowsFn fn;
    const char* name;
};

Selected select() {
    const char* wanted = std::getenv("DESTAB_KERNEL");
#if defined(__x86_64__) || defined(_M_X64)
    if (wanted && std::strcmp(wanted, "scalar") == 0) return {xor_rows_scalar, "scalar"};
    if (wanted && std::strcmp(wanted, "avx2") == 0) return {xor_rows_avx2, "avx2"};
    if (__builtin_cpu_supports("avx2")) return {xor_rows_avx2, "avx2"};
#elif defined(__aarch64__)
    if (wanted && std::strcmp(wanted, "scalar") == 0) return {xor_rows_scalar, "scalar"};
    if (wanted && std::strcmp(wanted, "neon") == 0) return {xor_rows_neon, "neon"};
    return {xor_rows_neon, "neon"};
#else
    (void)wanted;
#endif
    return {xor_rows_scalar, "scalar"};
}

const Selected& selected() {
    static Selected s = select();
    return s;
}

} // namespace

XorRowsFn xor_rows_fn() { return selected().fn; }
const char* kernel_name() { return selected().name; }

} // namespace destab::f2
