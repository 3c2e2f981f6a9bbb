#include "hmil_ted/simd/kernels.hpp"

#include "hmil_ted/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hmil_ted::simd {

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
    case KernelKind::Scalar: return "scalar";
    case KernelKind::Avx2: return "avx2";
    }
    return "?";
}

bool kernel_available(KernelKind kind) noexcept {
    switch (kind) {
    case KernelKind::Scalar: return true;
    case KernelKind::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

namespace {

KernelKind initial_kernel() noexcept {
    if (const char* env = std::getenv("HMIL_TED_KERNEL")) {
        std::string_view want(env);
        if (want == "scalar") return KernelKind::Scalar;
        if (want == "avx2" && kernel_available(KernelKind::Avx2)) return KernelKind::Avx2;
    }
    return kernel_available(KernelKind::Avx2) ? KernelKind::Avx2 : KernelKind::Scalar;
}

std::atomic<KernelKind>& active() noexcept {
    static std::atomic<KernelKind> kind{initial_kernel()};
    return kind;
}

} // namespace

KernelKind active_kernel() noexcept {
    return active().load(std::memory_order_relaxed);
}

void set_active_kernel(KernelKind kind) {
    if (!kernel_available(kind)) {
        throw ContractError("kernel " + std::string(to_string(kind)) + " is not supported on this CPU");
    }
    active().store(kind, std::memory_order_relaxed);
}

const HungarianKernels<std::int64_t>& int_kernels(KernelKind kind) {
#if defined(__x86_64__) || defined(_M_X64)
    if (kind == KernelKind::Avx2 && kernel_available(kind)) return detail::kAvx2Int;
#endif
    (void)kind;
    return detail::kScalarInt;
}

const HungarianKernels<double>& float_kernels(KernelKind kind) {
#if defined(__x86_64__) || defined(_M_X64)
    if (kind == KernelKind::Avx2 && kernel_available(kind)) return detail::kAvx2Float;
#endif
    (void)kind;
    return detail::kScalarFloat;
}

} // namespace hmil_ted::simd
