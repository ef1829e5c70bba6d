#pragma once

// Complex coefficient triple (a, b, c) and exponent m of
//
//     -Δu + a|u|^{-(1-m)}u + b u + c V² u = F,
//
// with the admissibility predicates and hypothesis checks for the existence,
// a priori bound and uniqueness results, and the explicit constants used by
// the bound certificates.

#include <complex>
#include <string>
#include <string_view>

namespace snls {

using cplx = std::complex<double>;

struct CoefficientTriple {
    cplx a{0.0, 0.0};
    cplx b{0.0, 0.0};
    cplx c{0.0, 0.0};
    double m = 0.5;

    // Throws std::invalid_argument unless 0 < m < 1 and every component is finite.
    void validate() const;
};

enum class TheoremId { Exist1, Exist2, Exist3, Uni1, Uni2, Uni3 };

std::string_view to_string(TheoremId id);

struct HypothesisReport {
    TheoremId theorem_id;
    bool satisfied = false;
    std::string witness;
};

enum class LemABCase { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

/// Constants delta_star, L, M such that, for every delta in [0, delta_star] and
/// nonnegative C0..C4 with
///     |C1 + δC2 + Re(a)C3 + (Re(b) - δ)C4| <= C0,   |Im(a)C3 + Im(b)C4| <= C0,
/// one has C1 + L·C3 + L·C4 <= M·C0.
struct LemABConstants {
    double delta_star = 0.0;
    double L = 0.0;
    double M = 0.0;
    double gamma = 0.0;
    LemABCase case_id = LemABCase::Case1;
};

/// Constants for the (a, b, c) energy bound with potential sup-norm R.
struct Lemeap2Constants {
    double A = 1.0;
    double A0 = 0.0;
    double R = 0.0;
    double M = 0.0;
};

// Membership in C minus the closed ray {Re z <= 0, Im z = 0}. Exact zero test
// on the imaginary part. Throws std::invalid_argument on non-finite input.
bool in_admissible_set(cplx z);

// The rotated set C minus {Re z = 0, Im z <= 0} used with the -iΔ form of the
// equation.
bool in_tilde_admissible_set(cplx z);

bool satisfies_condition_ab(cplx a, cplx b);

// Same condition written for (ia, ib); equivalent to satisfies_condition_ab(a, b).
bool satisfies_condition_abtilde(cplx a_tilde, cplx b_tilde);

// z = k·w for some k >= 0 (strict = true: k > 0), tested as
// Re(z conj w) >= 0 and |Im(z conj w)| <= 1e-12·|z||w|.
bool proportional_nonnegative(cplx z, cplx w, bool strict = false);

LemABCase classify_lemAB_case(cplx a, cplx b);

// Requires satisfies_condition_ab(a, b); throws std::invalid_argument otherwise.
LemABConstants compute_lemAB_constants(cplx a, cplx b);

// Requires Im(b) != 0 and, when Re(a) <= 0, Im(a) != 0.
Lemeap2Constants compute_lemeap2_constants(const CoefficientTriple& t, double R);

HypothesisReport check_existence_thm1(cplx b, double C_P);
HypothesisReport check_existence_thm2(const CoefficientTriple& t);
HypothesisReport check_existence_thm3(const CoefficientTriple& t);
HypothesisReport check_uniqueness(const CoefficientTriple& t);

}  // namespace snls
