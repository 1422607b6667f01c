#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "incomesim/kernels.hpp"

namespace incomesim::kernels::detail {

namespace {

void growth_step_avx2(double* m, const double* sl, double cum, const double* e_blocks,
                      size_t blocks) {
    const __m256d c = _mm256_set1_pd(cum);
    for (size_t b = 0; b < blocks; ++b) {
        const __m256d e = _mm256_set1_pd(e_blocks[b]);
        double* mb = m + b * block_stride;
        const double* sb = sl + b * block_stride;
        for (size_t k = 0; k < block_stride; k += 4) {
            const __m256d a = _mm256_mul_pd(c, _mm256_loadu_pd(sb + k));
            const __m256d v = _mm256_loadu_pd(mb + k);
            _mm256_storeu_pd(mb + k, _mm256_fmadd_pd(_mm256_sub_pd(v, a), e, a));
        }
    }
}

void decay_step_avx2(double* m, const double* f_blocks, size_t blocks) {
    for (size_t b = 0; b < blocks; ++b) {
        const __m256d f = _mm256_set1_pd(f_blocks[b]);
        double* mb = m + b * block_stride;
        for (size_t k = 0; k < block_stride; k += 4)
            _mm256_storeu_pd(mb + k, _mm256_mul_pd(_mm256_loadu_pd(mb + k), f));
    }
}

}  // namespace

bool avx2_usable() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const backend avx2_backend = {"avx2", growth_step_avx2, decay_step_avx2};

}  // namespace incomesim::kernels::detail

#endif
