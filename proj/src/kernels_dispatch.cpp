#include "gflow/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gflow/errors.hpp"

namespace gflow::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const Ops* resolve_initial() {
    if (const char* env = std::getenv("GFLOW_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available()) {
                throw ConfigError("GFLOW_KERNELS=avx2 requested but AVX2+FMA is unavailable");
            }
#if defined(__x86_64__) || defined(_M_X64)
            return &avx2_ops;
#endif
        }
        throw ConfigError(std::string("unknown GFLOW_KERNELS value: ") + env);
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &avx2_ops;
#endif
    return &scalar_ops;
}

std::atomic<const Ops*> active{nullptr};

const Ops* active_ptr() {
    const Ops* p = active.load(std::memory_order_acquire);
    if (!p) {
        p = resolve_initial();
        active.store(p, std::memory_order_release);
    }
    return p;
}

} // namespace

const Ops& ops() { return *active_ptr(); }

Backend active_backend() {
    return active_ptr() == &scalar_ops ? Backend::Scalar : Backend::Avx2;
}

const char* backend_name(Backend b) {
    return b == Backend::Scalar ? "scalar" : "avx2";
}

void set_backend(Backend b) {
    if (b == Backend::Scalar) {
        active.store(&scalar_ops, std::memory_order_release);
        return;
    }
    if (!avx2_available()) throw ConfigError("AVX2 backend unavailable on this CPU/build");
#if defined(__x86_64__) || defined(_M_X64)
    active.store(&avx2_ops, std::memory_order_release);
#endif
}

} // namespace gflow::kernels
