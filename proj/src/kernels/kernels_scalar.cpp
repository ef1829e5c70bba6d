#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace snls::kernels::detail {

void line_stencil_scalar(const double* u, std::size_t n, double inv_h2, bool neumann,
                         double shift, double* out)
{
    if (n == 0) return;
    if (n == 1) {
        const double diag = neumann ? 0.0 : 2.0 * inv_h2;
        out[0] = (diag + shift) * u[0];
        out[1] = (diag + shift) * u[1];
        return;
    }
    const double edge = neumann ? 2.0 : 1.0;
    for (int c = 0; c < 2; ++c) {
        out[c] = (2.0 * u[c] - edge * u[2 + c]) * inv_h2 + shift * u[c];
        const std::size_t last = 2 * (n - 1) + c;
        out[last] = (2.0 * u[last] - edge * u[last - 2]) * inv_h2 + shift * u[last];
    }
    for (std::size_t k = 2; k < 2 * (n - 1); ++k)
        out[k] = (2.0 * u[k] - u[k - 2] - u[k + 2]) * inv_h2 + shift * u[k];
}

void add_combination_scalar(double* out, std::size_t len, double c0, const double* x0,
                            double c1, const double* x1, double c2, const double* x2)
{
    for (std::size_t k = 0; k < len; ++k) {
        double acc = c0 * x0[k];
        if (x1) acc += c1 * x1[k];
        if (x2) acc += c2 * x2[k];
        out[k] += acc;
    }
}

void axpby_scalar(std::size_t len, double a, const double* x, double b, double* y)
{
    for (std::size_t k = 0; k < len; ++k) y[k] = a * x[k] + b * y[k];
}

double weighted_sq_norm_scalar(std::size_t n, const double* w, const double* u)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]);
    return acc;
}

double weighted_diff_sq_norm_scalar(std::size_t n, const double* w, const double* u,
                                    const double* v)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = u[2 * i] - v[2 * i];
        const double di = u[2 * i + 1] - v[2 * i + 1];
        acc += w[i] * (dr * dr + di * di);
    }
    return acc;
}

void weighted_inner_scalar(std::size_t n, const double* w, const double* u, const double* v,
                           double* out)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ur = u[2 * i], ui = u[2 * i + 1];
        const double vr = v[2 * i], vi = v[2 * i + 1];
        re += w[i] * (ur * vr + ui * vi);
        im += w[i] * (ui * vr - ur * vi);
    }
    out[0] = re;
    out[1] = im;
}

double max_abs_scalar(std::size_t n, const double* u)
{
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]);
    return std::sqrt(m);
}

}  // namespace snls::kernels::detail
