#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lmbias/simd/kernels.hpp"

namespace lmbias::simd {
namespace {

bool cpu_has_avx2() {
#if defined(LMBIAS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& select() {
    const char* forced = std::getenv("LMBIAS_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return detail::scalar_table;
#if defined(LMBIAS_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return detail::avx2_table;
#endif
    return detail::scalar_table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

const KernelTable& table_for(Isa isa) {
    if (!isa_supported(isa)) {
        throw std::runtime_error("ISA not supported on this CPU: " + std::string(isa_name(isa)));
    }
#if defined(LMBIAS_HAVE_AVX2_TU)
    if (isa == Isa::Avx2) return detail::avx2_table;
#endif
    return detail::scalar_table;
}

}  // namespace lmbias::simd
