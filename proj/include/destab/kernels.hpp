#ifndef DESTAB_KERNELS_HPP
#define DESTAB_KERNELS_HPP

#include <cstddef>
#include <cstdint>

namespace destab::f2 {

using Word = std::uint64_t;

/* The one performance-critical inner loop: XOR one packed GF(2) row into another.
   A scalar reference kernel and a SIMD variant are compiled side by side and one is
   selected at startup from CPU features (override with DESTAB_KERNEL=scalar|avx2|neon).
   Everything above this call is ordinary exact linear algebra. */

using XorRowsFn = void (*)(Word* dst, const Word* src, std::size_t nwords);

void xor_rows_scalar(Word* dst, const Word* src, std::size_t nwords);
#if defined(__x86_64__) || defined(_M_X64)
void xor_rows_avx2(Word* dst, const Word* src, std::size_t nwords);
#endif
#if defined(__aarch64__)
void xor_rows_neon(Word* dst, const Word* src, std::size_t nwords);
#endif

XorRowsFn xor_rows_fn();        // the selected kernel (stable after first call)
const char* kernel_name();      // "scalar", "avx2" or "neon"

inline void xor_rows(Word* dst, const Word* src, std::size_t nwords) {
    xor_rows_fn()(dst, src, nwords);
}

} // namespace destab::f2

#endif
