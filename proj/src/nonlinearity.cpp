#include "snls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace snls {

void NonlinearityParams::validate() const
{
    coeffs.validate();
    if (!std::isfinite(delta_shift) || delta_shift < 0.0)
        throw std::invalid_argument("delta shift must be finite and >= 0");
    for (double v : V)
        if (!std::isfinite(v)) throw std::invalid_argument("potential must be finite");
}

double NonlinearityParams::potential_sup() const
{
    double s = 0.0;
    for (double v : V) s = std::max(s, std::abs(v));
    return s;
}

cplx singular_part(cplx u, double m)
{
    const double r = std::abs(u);
    if (r == 0.0) return {0.0, 0.0};
    return std::pow(r, m - 1.0) * u;
}

cplx eval_f(const CoefficientTriple& t, cplx u, double v)
{
    return t.a * singular_part(u, t.m) + t.b * u + t.c * (v * v) * u;
}

cplx eval_f_trunc(const NonlinearityParams& p, double ell, cplx u, double v)
{
    const double r = std::abs(u);
    if (r <= ell) return eval_f(p.coeffs, u, v) - p.delta_shift * u;
    const auto& t = p.coeffs;
    const cplx amp = t.a * std::pow(ell, t.m) + (t.b - p.delta_shift) * ell + t.c * (v * v) * ell;
    return amp * (u / r);
}

double truncation_bound(const NonlinearityParams& p, double ell)
{
    const auto& t = p.coeffs;
    const double vs = p.potential_sup();
    return std::abs(t.a) * std::pow(ell, t.m) + std::abs(t.b - p.delta_shift) * ell +
           std::abs(t.c) * vs * vs * ell;
}

void apply_f(const NonlinearityParams& p, const Field& u, Field& out)
{
    if (out.size() != u.size()) out = Field(u.grid, u.bc);
    for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = eval_f(p.coeffs, u.values[i], p.potential(i));
}

void apply_f_trunc(const NonlinearityParams& p, double ell, const Field& u, Field& out)
{
    if (out.size() != u.size()) out = Field(u.grid, u.bc);
    for (std::size_t i = 0; i < u.size(); ++i)
        out.values[i] = eval_f_trunc(p, ell, u.values[i], p.potential(i));
}

PairingResult monotonicity_pairing(const Field& u1, const Field& u2, double m)
{
    if (u1.grid != u2.grid || u1.bc != u2.bc || u1.size() != u2.size())
        throw std::invalid_argument("monotonicity_pairing: fields live on different grids");
    const auto w = u1.grid->weights(u1.bc);
    PairingResult r;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        const cplx z = u1.values[i], y = u2.values[i];
        const cplx d = z - y;
        r.pairing += w[i] * ((singular_part(z, m) - singular_part(y, m)) * std::conj(d)).real();
        const double s = std::abs(z) + std::abs(y);
        if (s > 0.0) r.lower_integral += w[i] * std::norm(d) / std::pow(s, 1.0 - m);
    }
    return r;
}

MonotonicityConstant monotonicity_constant(double m, std::size_t resolution)
{
    if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("exponent m must lie in (0, 1)");
    if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
    MonotonicityConstant mc;
    mc.sampled_min = std::numeric_limits<double>::infinity();
    const cplx z{1.0, 0.0};
    const cplx fz = singular_part(z, m);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(resolution - 1);
        for (std::size_t j = 0; j < resolution; ++j) {
            const double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(resolution - 1);
            const cplx w = std::polar(r, th);
            const double den = std::norm(z - w);
            if (den < 1e-14) continue;
            const double num = ((fz - singular_part(w, m)) * std::conj(z - w)).real() *
                               std::pow(1.0 + r, 1.0 - m);
            mc.sampled_min = std::min(mc.sampled_min, num / den);
            ++mc.samples;
        }
    }
    mc.lower_bound = 0.95 * mc.sampled_min;
    return mc;
}

}  // namespace snls
