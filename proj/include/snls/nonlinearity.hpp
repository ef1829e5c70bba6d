#pragma once

// Pointwise evaluation of f(u) = a|u|^{-(1-m)}u + b u + c v² u, its radial
// truncation at amplitude ℓ with the shift δ moved to the operator side, and
// the monotonicity pairing of the singular part.

#include "snls/coefficients.hpp"
#include "snls/mesh.hpp"

#include <cstddef>
#include <vector>

namespace snls {

struct NonlinearityParams {
    CoefficientTriple coeffs;
    // Potential V per node in field layout; empty means V = 0.
    std::vector<double> V;
    double delta_shift = 0.0;

    void validate() const;
    double potential(std::size_t i) const { return V.empty() ? 0.0 : V[i]; }
    double potential_sup() const;
};

// |u|^{m-1} u, with the removable value 0 at u = 0.
cplx singular_part(cplx u, double m);

cplx eval_f(const CoefficientTriple& t, cplx u, double v);

// Truncated nonlinearity: eval_f(u) - δu for |u| <= ell, and
// (a ell^m + (b - δ) ell + c v² ell) u/|u| beyond.
cplx eval_f_trunc(const NonlinearityParams& p, double ell, cplx u, double v);

// Uniform bound |a| ell^m + |b - δ| ell + |c| v_sup² ell on |eval_f_trunc|.
double truncation_bound(const NonlinearityParams& p, double ell);

// out_i = f(u_i) (ell = +inf) or f_ell(u_i) node by node.
void apply_f(const NonlinearityParams& p, const Field& u, Field& out);
void apply_f_trunc(const NonlinearityParams& p, double ell, const Field& u, Field& out);

struct PairingResult {
    double pairing = 0.0;
    double lower_integral = 0.0;
};

// pairing = Re ∫ (f0(u1) - f0(u2)) conj(u1 - u2), f0(v) = |v|^{m-1} v;
// lower_integral = ∫ |u1 - u2|² / (|u1| + |u2|)^{1-m} over {|u1| + |u2| > 0}.
PairingResult monotonicity_pairing(const Field& u1, const Field& u2, double m);

struct MonotonicityConstant {
    double sampled_min = 0.0;
    // 0.95 × sampled_min; the value used when checking pairing >= C·lower_integral.
    double lower_bound = 0.0;
    std::size_t samples = 0;
};

// Minimum of Re[(f0(z) - f0(w)) conj(z - w)] (|z| + |w|)^{1-m} / |z - w|² over
// a dense sample. The ratio is invariant under common scaling and rotation, so
// it is sampled on z = 1, w = r e^{iθ}, 0 <= r <= 1, 0 <= θ <= π.
MonotonicityConstant monotonicity_constant(double m, std::size_t resolution = 801);

}  // namespace snls
