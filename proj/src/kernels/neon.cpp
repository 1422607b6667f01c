#if defined(__aarch64__)

#include <arm_neon.h>

#include "incomesim/kernels.hpp"

namespace incomesim::kernels::detail {

namespace {

void growth_step_neon(double* m, const double* sl, double cum, const double* e_blocks,
                      size_t blocks) {
    const float64x2_t c = vdupq_n_f64(cum);
    for (size_t b = 0; b < blocks; ++b) {
        const float64x2_t e = vdupq_n_f64(e_blocks[b]);
        double* mb = m + b * block_stride;
        const double* sb = sl + b * block_stride;
        for (size_t k = 0; k < block_stride; k += 2) {
            const float64x2_t a = vmulq_f64(c, vld1q_f64(sb + k));
            const float64x2_t v = vld1q_f64(mb + k);
            // a + (v - a) * e, fused
            vst1q_f64(mb + k, vfmaq_f64(a, vsubq_f64(v, a), e));
        }
    }
}

void decay_step_neon(double* m, const double* f_blocks, size_t blocks) {
    for (size_t b = 0; b < blocks; ++b) {
        const float64x2_t f = vdupq_n_f64(f_blocks[b]);
        double* mb = m + b * block_stride;
        for (size_t k = 0; k < block_stride; k += 2)
            vst1q_f64(mb + k, vmulq_f64(vld1q_f64(mb + k), f));
    }
}

}  // namespace

const backend neon_backend = {"neon", growth_step_neon, decay_step_neon};

}  // namespace incomesim::kernels::detail

#endif
