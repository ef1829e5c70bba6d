#pragma once

// Energy identities and a priori bound certificates evaluated on a computed
// solution. Every certificate records the constants it used, so a verdict
// can be reproduced by hand.

#include "snls/solver.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace snls {

// Thrown when a certificate is requested outside the hypotheses of its bound.
class HypothesisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Slack added to every verdict: 5% plus h_max².
double certificate_slack(const Grid& grid);

struct IdentityDefects {
    // |‖∇u‖² + Re(a)‖u‖_{m+1}^{m+1} + Re(b)‖u‖² + Re(c)‖Vu‖² - Re∫F conj(u)| and
    // the same with imaginary parts (no gradient term).
    double re_defect = 0.0;
    double im_defect = 0.0;
    // Same defects divided by ‖F‖‖u‖ (0 when that product vanishes).
    double re_relative = 0.0;
    double im_relative = 0.0;
    // ‖-Δ_h u + f(u) - F‖ ‖u‖, the Cauchy–Schwarz ceiling on both defects.
    double residual_bound = 0.0;
};

IdentityDefects energy_identities(const Field& u, const Problem& problem);

enum class BoundKind {
    // ‖∇u‖ bound for -Δu + a|u|^{-(1-m)}u + bu = F, Dirichlet, via Poincaré.
    Gradient,
    // H¹ + L^{m+1} bound with potential, Im(a) <= 0, Im(b) < 0, Im(c) <= 0.
    Potential,
    // H¹ + L^{m+1} bound under condition (ab), c = 0.
    CoefficientPair,
};

std::string_view to_string(BoundKind k);

struct BoundCertificate {
    BoundKind kind = BoundKind::Gradient;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool verdict = false;
    IdentityDefects defects;
    std::map<std::string, double> constants_used;
};

// Radius C of the gradient bound ‖∇u‖ <= C and the case used (1, 2 or 3,
// selected by the sign pattern of b). measure is |Ω|. Throws HypothesisError
// when Re(b) <= -1/C_P² with Im(b) = 0.
struct GradientBound {
    double radius = 0.0;
    int step = 0;
    std::map<std::string, double> constants;
};

GradientBound gradient_bound_radius(cplx a, cplx b, double m, double C_P, double measure,
                                    double normF);

// Largest root of c2 s² - k s^{m+1} - c0 = 0 for c2 > 0, k >= 0, c0 >= 0 (0 when c0 = 0
// and k = 0). The left side is negative below the root and positive above it.
double largest_root(double c2, double k, double m, double c0);

BoundCertificate certify_thm_bound1(const Field& u, const Problem& problem, double C_P);
BoundCertificate certify_thm_bound2(const Field& u, const Problem& problem);
BoundCertificate certify_thm_bound3(const Field& u, const Problem& problem);

struct SupportMeasure {
    double measure = 0.0;
    // Radius of the smallest origin-centred ball containing {|u| > eps}.
    double bounding_radius = 0.0;
};

SupportMeasure support_measure(const Field& u, double eps);

}  // namespace snls
