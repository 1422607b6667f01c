#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "incomesim/kernels.hpp"

namespace incomesim::kernels {

namespace {

std::vector<backend> enumerate() {
    std::vector<backend> v;
#if defined(__x86_64__) || defined(_M_X64)
    if (detail::avx2_usable()) v.push_back(detail::avx2_backend);
#endif
#if defined(__aarch64__)
    v.push_back(detail::neon_backend);
#endif
    v.push_back(detail::scalar_backend);
    return v;
}

const std::vector<backend>& all() {
    static const std::vector<backend> v = enumerate();
    return v;
}

backend pick_default() {
    if (const char* env = std::getenv("INCOMESIM_KERNEL")) {
        for (const auto& b : all())
            if (b.name == std::string(env)) return b;
    }
    return all().front();
}

backend& current() {
    static backend b = pick_default();
    return b;
}

}  // namespace

const backend& active() { return current(); }

void set_backend(const std::string& name) {
    for (const auto& b : all()) {
        if (name == b.name) {
            current() = b;
            return;
        }
    }
    throw std::invalid_argument("unknown or unsupported kernel backend '" + name + "'");
}

const backend* supported_backends(size_t* count) {
    *count = all().size();
    return all().data();
}

}  // namespace incomesim::kernels
