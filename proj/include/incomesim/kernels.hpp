#pragma once

#include <cstddef>
#include <string>

namespace incomesim::kernels {

// Trajectory state for one cohort: the 841 income states laid out as one
// block per earning-means rank L (29 for the default grid), each padded to 32
// slots (capability ranks S plus zero pads). Within a block the relaxation
// rate is constant, so the per-year exp() factors are computed once per block
// by the caller and the inner loop is pure multiply/add. Pads hold zeros and
// stay zero under both steps.
inline constexpr size_t block_stride = 32;

// One exact exponential relaxation step toward the per-state asymptote
// cum * sl[k]:  m[k] = (m[k] - a)*e_block + a.
// e_blocks[b] = exp(-rate_b * dt), supplied by the caller.
using growth_fn = void (*)(double* m, const double* sl, double cum, const double* e_blocks,
                           size_t blocks);

// Pure exponential decay:  m[k] *= f_blocks[b] for every state in block b.
using decay_fn = void (*)(double* m, const double* f_blocks, size_t blocks);

struct backend {
    const char* name;
    growth_fn growth_step;
    decay_fn decay_step;
};

// The active backend, selected at first use: best SIMD variant the CPU
// supports, overridable with INCOMESIM_KERNEL=scalar|avx2|neon or set_backend().
const backend& active();

// Force a specific backend ("scalar", "avx2", "neon"). Throws
// std::invalid_argument for unknown or unsupported names.
void set_backend(const std::string& name);

// All backends usable on this machine (scalar always included).
// Every variant computes bit-identical results: the arithmetic is fixed to
// mul + fused-multiply-add in the same order, and the exp tables are shared.
const backend* supported_backends(size_t* count);

namespace detail {
extern const backend scalar_backend;
#if defined(__x86_64__) || defined(_M_X64)
extern const backend avx2_backend;
bool avx2_usable();
#endif
#if defined(__aarch64__)
extern const backend neon_backend;
#endif
}  // namespace detail

}  // namespace incomesim::kernels
