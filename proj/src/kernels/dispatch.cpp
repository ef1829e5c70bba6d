#include "snls/kernels.hpp"

#include "kernels_impl.hpp"

#include <cstdlib>
#include <cstring>

namespace snls::kernels {

const Table& scalar()
{
    static const Table table{
        "scalar",
        detail::line_stencil_scalar,
        detail::add_combination_scalar,
        detail::axpby_scalar,
        detail::weighted_sq_norm_scalar,
        detail::weighted_diff_sq_norm_scalar,
        detail::weighted_inner_scalar,
        detail::max_abs_scalar,
    };
    return table;
}

const Table* avx2()
{
#if defined(SNLS_HAVE_AVX2_KERNELS)
    static const Table table{
        "avx2",
        detail::line_stencil_avx2,
        detail::add_combination_avx2,
        detail::axpby_avx2,
        detail::weighted_sq_norm_avx2,
        detail::weighted_diff_sq_norm_avx2,
        detail::weighted_inner_avx2,
        detail::max_abs_avx2,
    };
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const Table& active()
{
    static const Table& chosen = [] () -> const Table& {
        const char* env = std::getenv("SNLS_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return scalar();
        if (const Table* t = avx2()) return *t;
        return scalar();
    }();
    return chosen;
}

std::string_view active_name() { return active().name; }

}  // namespace snls::kernels
