#pragma once

#include <cstddef>

namespace snls::kernels::detail {

void line_stencil_scalar(const double* u, std::size_t n, double inv_h2, bool neumann,
                         double shift, double* out);
void add_combination_scalar(double* out, std::size_t len, double c0, const double* x0,
                            double c1, const double* x1, double c2, const double* x2);
void axpby_scalar(std::size_t len, double a, const double* x, double b, double* y);
double weighted_sq_norm_scalar(std::size_t n, const double* w, const double* u);
double weighted_diff_sq_norm_scalar(std::size_t n, const double* w, const double* u,
                                    const double* v);
void weighted_inner_scalar(std::size_t n, const double* w, const double* u, const double* v,
                           double* out);
double max_abs_scalar(std::size_t n, const double* u);

#if defined(SNLS_HAVE_AVX2_KERNELS)
void line_stencil_avx2(const double* u, std::size_t n, double inv_h2, bool neumann,
                       double shift, double* out);
void add_combination_avx2(double* out, std::size_t len, double c0, const double* x0,
                          double c1, const double* x1, double c2, const double* x2);
void axpby_avx2(std::size_t len, double a, const double* x, double b, double* y);
double weighted_sq_norm_avx2(std::size_t n, const double* w, const double* u);
double weighted_diff_sq_norm_avx2(std::size_t n, const double* w, const double* u,
                                  const double* v);
void weighted_inner_avx2(std::size_t n, const double* w, const double* u, const double* v,
                         double* out);
double max_abs_avx2(std::size_t n, const double* u);
#endif

}  // namespace snls::kernels::detail
