#pragma once

// Sampling oracle for the coefficient-pair lemma: draws nonnegative tuples
// (C1..C4), a shift δ in [0, δ★], and the smallest C0 compatible with both
// constraints (or a random multiple of it), then reports the worst
// violation of C1 + L·C3 + L·C4 <= M·C0 relative to the tuple size.

#include "snls/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace snls::test {

struct LemABSampleReport {
    double worst_excess = -1e300;  // max of (lhs - M C0) / scale
    std::size_t samples = 0;
};

inline LemABSampleReport sample_lemab(cplx a, cplx b, const LemABConstants& k, std::size_t samples,
                                      std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    LemABSampleReport rep;
    for (std::size_t s = 0; s < samples; ++s) {
        double C[5];
        for (int i = 1; i <= 4; ++i) {
            // log-uniform magnitudes with occasional exact zeros
            C[i] = U(rng) < 0.15 ? 0.0 : std::pow(10.0, -3.0 + 6.0 * U(rng));
        }
        const double delta = (s % 4 == 0) ? k.delta_star : k.delta_star * U(rng);
        const double re = C[1] + delta * C[2] + a.real() * C[3] + (b.real() - delta) * C[4];
        const double im = a.imag() * C[3] + b.imag() * C[4];
        double C0 = std::max(std::abs(re), std::abs(im));
        if (s % 3 == 1) C0 *= 1.0 + U(rng);
        const double lhs = C[1] + k.L * C[3] + k.L * C[4];
        const double scale = C[1] + C[2] + C[3] + C[4] + C0 + 1e-300;
        rep.worst_excess = std::max(rep.worst_excess, (lhs - k.M * C0) / scale);
        ++rep.samples;
    }
    return rep;
}

// Random (a, b) in condition (ab) forced into the requested proof case.
inline std::pair<cplx, cplx> draw_ab(LemABCase target, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    std::uniform_int_distribution<int> pick(0, 5);
    for (;;) {
        cplx a{U(rng), U(rng)};
        cplx b{U(rng), U(rng)};
        // exercise the boundary values Re = 0 and Im = 0 now and then
        if (pick(rng) == 0) a.real(0.0);
        if (pick(rng) == 0) b.real(0.0);
        if (pick(rng) == 0) b.imag(0.0);
        if (!satisfies_condition_ab(a, b)) continue;
        if (classify_lemAB_case(a, b) == target) return {a, b};
    }
}

}  // namespace snls::test
