#include "snls/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace snls {

namespace {

struct Integrals {
    double grad_sq = 0.0;  // ‖∇u‖²
    double l2_sq = 0.0;    // ‖u‖²
    double lm = 0.0;       // ‖u‖_{m+1}^{m+1}
    double pot = 0.0;      // ‖Vu‖²
    cplx source{0.0, 0.0}; // ∫F conj(u)
};

Integrals integrals(const Field& u, const Problem& p)
{
    if (u.grid != p.grid || u.bc != p.bc) throw std::invalid_argument("field does not match the problem");
    const auto w = p.grid->weights(p.bc);
    Integrals s;
    const double g = h1_seminorm(u);
    s.grad_sq = g * g;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = std::abs(u.values[i]);
        const double v = p.potential(i);
        s.l2_sq += w[i] * r * r;
        s.lm += w[i] * std::pow(r, p.coeffs.m + 1.0);
        s.pot += w[i] * v * v * r * r;
    }
    s.source = inner(p.F, u);
    return s;
}

bool potential_term_vanishes(const Problem& p)
{
    if (p.coeffs.c == cplx{0.0, 0.0}) return true;
    return std::all_of(p.V.begin(), p.V.end(), [](double v) { return v == 0.0; });
}

BoundCertificate finish(BoundKind kind, double lhs, double rhs, const Field& u, const Problem& p)
{
    BoundCertificate c;
    c.kind = kind;
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = certificate_slack(*p.grid);
    c.verdict = lhs <= rhs * (1.0 + c.slack);
    c.defects = energy_identities(u, p);
    return c;
}

}  // namespace

double certificate_slack(const Grid& grid)
{
    const double h = grid.max_spacing();
    return 0.05 + h * h;
}

std::string_view to_string(BoundKind k)
{
    switch (k) {
    case BoundKind::Gradient: return "bound_gradient";
    case BoundKind::Potential: return "bound_potential";
    case BoundKind::CoefficientPair: return "bound_coefficient_pair";
    }
    return "unknown";
}

IdentityDefects energy_identities(const Field& u, const Problem& problem)
{
    problem.validate();
    const auto s = integrals(u, problem);
    const auto& t = problem.coeffs;
    IdentityDefects d;
    d.re_defect = std::abs(s.grad_sq + t.a.real() * s.lm + t.b.real() * s.l2_sq + t.c.real() * s.pot -
                           s.source.real());
    d.im_defect = std::abs(t.a.imag() * s.lm + t.b.imag() * s.l2_sq + t.c.imag() * s.pot - s.source.imag());
    const double scale = l2_norm(problem.F) * std::sqrt(s.l2_sq);
    if (scale > 0.0) {
        d.re_relative = d.re_defect / scale;
        d.im_relative = d.im_defect / scale;
    }
    d.residual_bound = l2_norm(discrete_residual(problem, u)) * std::sqrt(s.l2_sq);
    return d;
}

double largest_root(double c2, double k, double m, double c0)
{
    if (!(c2 > 0.0) || k < 0.0 || c0 < 0.0) throw std::invalid_argument("largest_root: bad coefficients");
    if (c0 == 0.0 && k == 0.0) return 0.0;
    auto g = [&](double s) { return c2 * s * s - k * std::pow(s, m + 1.0) - c0; };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; g(hi) <= 0.0; ++i) {
        lo = hi;
        hi *= 2.0;
        if (i > 2000) throw std::runtime_error("largest_root: no sign change found");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

GradientBound gradient_bound_radius(cplx a, cplx b, double m, double C_P, double measure, double normF)
{
    if (!(C_P > 0.0) || !(measure > 0.0) || normF < 0.0)
        throw std::invalid_argument("gradient bound: C_P, |Ω| must be positive and ‖F‖ >= 0");
    const double hol = std::pow(measure, 0.5 * (1.0 - m));  // |Ω|^{(1-m)/2}
    const double K = std::max(0.0, -a.real()) * std::pow(C_P, m + 1.0) * hol;
    const double F2 = normF * normF;
    const double CP2 = C_P * C_P;

    GradientBound gb;
    gb.constants = {{"C_P", C_P}, {"measure", measure}, {"K", K}, {"norm_F", normF}};
    if (b.real() >= 0.0) {
        // s²/2 - K s^{m+1} <= C_P²‖F‖²/2
        gb.step = 1;
        gb.radius = largest_root(1.0, 2.0 * K, m, CP2 * F2);
    } else if (b.imag() != 0.0) {
        // ‖u‖ <= C0 from the imaginary identity, then the real one
        gb.step = 2;
        const double ib = std::abs(b.imag());
        const double C0 = largest_root(ib, 2.0 * std::abs(a.imag()) * hol, m, F2 / ib);
        gb.constants["C0"] = C0;
        gb.radius = largest_root(1.0, 2.0 * K, m, 2.0 * std::abs(b.real()) * C0 * C0 + CP2 * F2);
    } else {
        const double margin = 1.0 - std::abs(b.real()) * CP2;
        if (!(margin > 0.0))
            throw HypothesisError("gradient bound needs Re(b) > -1/C_P^2 when Im(b) = 0");
        gb.step = 3;
        const double mu0_sq = CP2 / margin;
        const double C2 = 0.5 * margin;
        gb.constants["mu0_sq"] = mu0_sq;
        gb.constants["C2"] = C2;
        gb.radius = largest_root(C2, K, m, 0.5 * mu0_sq * F2);
    }
    gb.constants["step"] = gb.step;
    return gb;
}

BoundCertificate certify_thm_bound1(const Field& u, const Problem& problem, double C_P)
{
    problem.validate();
    if (problem.bc != BoundaryKind::Dirichlet)
        throw HypothesisError("gradient bound is stated for Dirichlet fields");
    if (!potential_term_vanishes(problem))
        throw HypothesisError("gradient bound needs c = 0 (or V = 0)");
    const auto& t = problem.coeffs;
    const auto gb = gradient_bound_radius(t.a, t.b, t.m, C_P, problem.grid->measure(), l2_norm(problem.F));
    auto cert = finish(BoundKind::Gradient, h1_seminorm(u), gb.radius, u, problem);
    cert.constants_used = gb.constants;
    return cert;
}

BoundCertificate certify_thm_bound2(const Field& u, const Problem& problem)
{
    problem.validate();
    const auto hyp = check_existence_thm2(problem.coeffs);
    if (!hyp.satisfied) throw HypothesisError("potential bound hypotheses fail: " + hyp.witness);
    double R = 0.0;
    for (double v : problem.V) R = std::max(R, std::abs(v));
    const auto k = compute_lemeap2_constants(problem.coeffs, R);
    const auto s = integrals(u, problem);
    const double normF = l2_norm(problem.F);
    const double lhs = s.grad_sq + s.l2_sq + s.lm;
    const double rhs = k.M * (std::pow(R, 4) + 1.0) * normF * normF;
    auto cert = finish(BoundKind::Potential, lhs, rhs, u, problem);
    cert.constants_used = {{"A", k.A}, {"A0", k.A0}, {"R", R}, {"M", k.M}, {"norm_F", normF}};
    return cert;
}

BoundCertificate certify_thm_bound3(const Field& u, const Problem& problem)
{
    problem.validate();
    if (!potential_term_vanishes(problem))
        throw HypothesisError("coefficient-pair bound needs c = 0 (or V = 0)");
    const auto& t = problem.coeffs;
    if (!satisfies_condition_ab(t.a, t.b)) throw HypothesisError("(a, b) does not satisfy condition (ab)");
    const auto k = compute_lemAB_constants(t.a, t.b);
    // C1 + L C3 + L C4 <= M ‖F‖‖u‖ <= M²‖F‖²/(2L) + (L/2)‖u‖²
    const double M_prime = k.M * k.M / (2.0 * k.L) * std::max(1.0, 2.0 / k.L);
    const auto s = integrals(u, problem);
    const double normF = l2_norm(problem.F);
    const double lhs = s.grad_sq + s.l2_sq + s.lm;
    auto cert = finish(BoundKind::CoefficientPair, lhs, M_prime * normF * normF, u, problem);
    cert.constants_used = {{"delta_star", k.delta_star}, {"L", k.L},          {"M", k.M},
                           {"gamma", k.gamma},           {"M_prime", M_prime}, {"norm_F", normF},
                           {"case", static_cast<double>(k.case_id)}};
    return cert;
}

SupportMeasure support_measure(const Field& u, double eps)
{
    if (!(eps > 0.0)) throw std::invalid_argument("support_measure needs eps > 0");
    const auto w = u.grid->weights(u.bc);
    SupportMeasure s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::abs(u.values[i]) <= eps) continue;
        s.measure += w[i];
        const auto [x, y] = u.grid->node(u.bc, i);
        s.bounding_radius = std::max(s.bounding_radius, std::hypot(x, y));
    }
    return s;
}

}  // namespace snls
