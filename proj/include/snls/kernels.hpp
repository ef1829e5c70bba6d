#pragma once

// Data-parallel inner loops shared by the grid operators and the solver.
//
// Every kernel works on complex grid data stored interleaved (re, im, re, im,
// ...), which is the layout std::complex<double> guarantees. A scalar
// reference table is always available; an AVX2/FMA table is compiled in on
// x86-64 and selected at runtime when the CPU supports it.

#include <cstddef>
#include <string_view>

namespace snls::kernels {

struct Table {
    const char* name;

    // out[i] = (2u[i] - u[i-1] - u[i+1]) * inv_h2 + shift * u[i] over n complex
    // points. Dirichlet rows treat the missing neighbour as zero; Neumann rows
    // reflect through a ghost node, giving (2u[0] - 2u[1]) * inv_h2 at the ends.
    void (*line_stencil)(const double* u, std::size_t n, double inv_h2, bool neumann,
                         double shift, double* out);

    // out[k] += c0*x0[k] + c1*x1[k] + c2*x2[k] for k < len (len counts doubles).
    // x1 and x2 may be null, in which case their term is skipped.
    void (*add_combination)(double* out, std::size_t len, double c0, const double* x0,
                            double c1, const double* x1, double c2, const double* x2);

    // y[k] = a*x[k] + b*y[k] for k < len (len counts doubles).
    void (*axpby)(std::size_t len, double a, const double* x, double b, double* y);

    // sum_i w[i] * |u[i]|^2 over n complex points.
    double (*weighted_sq_norm)(std::size_t n, const double* w, const double* u);

    // sum_i w[i] * |u[i] - v[i]|^2 over n complex points.
    double (*weighted_diff_sq_norm)(std::size_t n, const double* w, const double* u,
                                    const double* v);

    // out = sum_i w[i] * u[i] * conj(v[i]) as (re, im).
    void (*weighted_inner)(std::size_t n, const double* w, const double* u, const double* v,
                           double* out);

    // max_i |u[i]|.
    double (*max_abs)(std::size_t n, const double* u);
};

const Table& scalar();

// Null when the AVX2 table was not compiled in or the CPU lacks AVX2/FMA.
const Table* avx2();

// The table used by the library. Chosen once: AVX2 when available unless the
// environment variable SNLS_KERNELS is set to "scalar".
const Table& active();

std::string_view active_name();

}  // namespace snls::kernels
