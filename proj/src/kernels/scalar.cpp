#include <cmath>

#include "incomesim/kernels.hpp"

namespace incomesim::kernels::detail {

namespace {

// Reference kernels. std::fma keeps these bit-identical to the SIMD
// variants, which use hardware fused multiply-add.
void growth_step_scalar(double* m, const double* sl, double cum, const double* e_blocks,
                        size_t blocks) {
    for (size_t b = 0; b < blocks; ++b) {
        const double e = e_blocks[b];
        double* mb = m + b * block_stride;
        const double* sb = sl + b * block_stride;
        for (size_t k = 0; k < block_stride; ++k) {
            const double a = cum * sb[k];
            mb[k] = std::fma(mb[k] - a, e, a);
        }
    }
}

void decay_step_scalar(double* m, const double* f_blocks, size_t blocks) {
    for (size_t b = 0; b < blocks; ++b) {
        const double f = f_blocks[b];
        double* mb = m + b * block_stride;
        for (size_t k = 0; k < block_stride; ++k) mb[k] *= f;
    }
}

}  // namespace

const backend scalar_backend = {"scalar", growth_step_scalar, decay_step_scalar};

}  // namespace incomesim::kernels::detail
