// AVX2/FMA variants of the kernels in kernels_scalar.cpp. Each function carries
// its own target attribute so this translation unit needs no global -mavx2 and
// nothing here leaks AVX instructions into inline code shared with other units.

#include "kernels_impl.hpp"

#if defined(SNLS_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#define SNLS_AVX2 __attribute__((target("avx2,fma")))

namespace snls::kernels::detail {

namespace {

SNLS_AVX2 inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [w0, w0, w1, w1] from two consecutive node weights.
SNLS_AVX2 inline __m256d duplicate_weights(const double* w)
{
    const __m128d pair = _mm_loadu_pd(w);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(pair), 0x50);
}

}  // namespace

SNLS_AVX2 void line_stencil_avx2(const double* u, std::size_t n, double inv_h2, bool neumann,
                                 double shift, double* out)
{
    if (n < 3) {
        line_stencil_scalar(u, n, inv_h2, neumann, shift, out);
        return;
    }
    const double edge = neumann ? 2.0 : 1.0;
    for (int c = 0; c < 2; ++c) {
        out[c] = (2.0 * u[c] - edge * u[2 + c]) * inv_h2 + shift * u[c];
        const std::size_t last = 2 * (n - 1) + c;
        out[last] = (2.0 * u[last] - edge * u[last - 2]) * inv_h2 + shift * u[last];
    }
    const __m256d diag = _mm256_set1_pd(2.0 * inv_h2 + shift);
    const __m256d off = _mm256_set1_pd(inv_h2);
    const std::size_t end = 2 * (n - 1);
    std::size_t k = 2;
    for (; k + 4 <= end; k += 4) {
        const __m256d c0 = _mm256_loadu_pd(u + k);
        const __m256d nb = _mm256_add_pd(_mm256_loadu_pd(u + k - 2), _mm256_loadu_pd(u + k + 2));
        _mm256_storeu_pd(out + k, _mm256_fnmadd_pd(nb, off, _mm256_mul_pd(c0, diag)));
    }
    for (; k < end; ++k)
        out[k] = (2.0 * u[k] - u[k - 2] - u[k + 2]) * inv_h2 + shift * u[k];
}

SNLS_AVX2 void add_combination_avx2(double* out, std::size_t len, double c0, const double* x0,
                                    double c1, const double* x1, double c2, const double* x2)
{
    const __m256d v0 = _mm256_set1_pd(c0);
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    std::size_t k = 0;
    for (; k + 4 <= len; k += 4) {
        __m256d acc = _mm256_mul_pd(v0, _mm256_loadu_pd(x0 + k));
        if (x1) acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(x1 + k), acc);
        if (x2) acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(x2 + k), acc);
        _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), acc));
    }
    for (; k < len; ++k) {
        double acc = c0 * x0[k];
        if (x1) acc += c1 * x1[k];
        if (x2) acc += c2 * x2[k];
        out[k] += acc;
    }
}

SNLS_AVX2 void axpby_avx2(std::size_t len, double a, const double* x, double b, double* y)
{
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t k = 0;
    for (; k + 4 <= len; k += 4) {
        const __m256d yv = _mm256_mul_pd(vb, _mm256_loadu_pd(y + k));
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), yv));
    }
    for (; k < len; ++k) y[k] = a * x[k] + b * y[k];
}

SNLS_AVX2 double weighted_sq_norm_avx2(std::size_t n, const double* w, const double* u)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(u + 2 * i);
        const __m256d b = _mm256_loadu_pd(u + 2 * i + 4);
        acc0 = _mm256_fmadd_pd(duplicate_weights(w + i), _mm256_mul_pd(a, a), acc0);
        acc1 = _mm256_fmadd_pd(duplicate_weights(w + i + 2), _mm256_mul_pd(b, b), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += w[i] * (u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]);
    return acc;
}

SNLS_AVX2 double weighted_diff_sq_norm_avx2(std::size_t n, const double* w, const double* u,
                                           const double* v)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(u + 2 * i), _mm256_loadu_pd(v + 2 * i));
        acc = _mm256_fmadd_pd(duplicate_weights(w + i), _mm256_mul_pd(d, d), acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double dr = u[2 * i] - v[2 * i];
        const double di = u[2 * i + 1] - v[2 * i + 1];
        total += w[i] * (dr * dr + di * di);
    }
    return total;
}

SNLS_AVX2 void weighted_inner_avx2(std::size_t n, const double* w, const double* u,
                                   const double* v, double* out)
{
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d ww = duplicate_weights(w + i);
        const __m256d uv = _mm256_loadu_pd(u + 2 * i);
        const __m256d vv = _mm256_loadu_pd(v + 2 * i);
        // (vr, vi) -> (vi, vr) within each complex lane pair
        const __m256d vs = _mm256_permute_pd(vv, 0x5);
        acc_re = _mm256_fmadd_pd(ww, _mm256_mul_pd(uv, vv), acc_re);
        acc_im = _mm256_fmadd_pd(ww, _mm256_mul_pd(uv, vs), acc_im);
    }
    alignas(32) double im_lanes[4];
    _mm256_store_pd(im_lanes, acc_im);
    // lanes hold (ur*vi, ui*vr); imaginary part is ui*vr - ur*vi
    double re = hsum(acc_re);
    double im = (im_lanes[1] + im_lanes[3]) - (im_lanes[0] + im_lanes[2]);
    for (; i < n; ++i) {
        const double ur = u[2 * i], ui = u[2 * i + 1];
        const double vr = v[2 * i], vi = v[2 * i + 1];
        re += w[i] * (ur * vr + ui * vi);
        im += w[i] * (ui * vr - ur * vi);
    }
    out[0] = re;
    out[1] = im;
}

SNLS_AVX2 double max_abs_avx2(std::size_t n, const double* u)
{
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d a = _mm256_loadu_pd(u + 2 * i);
        const __m256d sq = _mm256_mul_pd(a, a);
        best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::max(m, u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]);
    return std::sqrt(m);
}

}  // namespace snls::kernels::detail

#endif
