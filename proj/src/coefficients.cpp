#include "snls/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace snls {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt_c(cplx z)
{
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

void require_finite(cplx z, const char* what)
{
    if (!finite(z)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

void CoefficientTriple::validate() const
{
    require_finite(a, "coefficient a");
    require_finite(b, "coefficient b");
    require_finite(c, "coefficient c");
    if (!std::isfinite(m) || !(m > 0.0 && m < 1.0))
        throw std::invalid_argument("exponent m must lie in (0, 1)");
}

std::string_view to_string(TheoremId id)
{
    switch (id) {
    case TheoremId::Exist1: return "Exist1";
    case TheoremId::Exist2: return "Exist2";
    case TheoremId::Exist3: return "Exist3";
    case TheoremId::Uni1: return "Uni1";
    case TheoremId::Uni2: return "Uni2";
    case TheoremId::Uni3: return "Uni3";
    }
    return "unknown";
}

bool in_admissible_set(cplx z)
{
    require_finite(z, "argument");
    return !(z.real() <= 0.0 && z.imag() == 0.0);
}

bool in_tilde_admissible_set(cplx z)
{
    require_finite(z, "argument");
    return !(z.real() == 0.0 && z.imag() <= 0.0);
}

bool satisfies_condition_ab(cplx a, cplx b)
{
    if (!in_admissible_set(a) || !in_admissible_set(b)) return false;
    const double prod = a.imag() * b.imag();
    if (prod >= 0.0) return true;
    return b.real() > (b.imag() / a.imag()) * a.real();
}

bool satisfies_condition_abtilde(cplx at, cplx bt)
{
    if (!in_tilde_admissible_set(at) || !in_tilde_admissible_set(bt)) return false;
    const double prod = at.real() * bt.real();
    if (prod >= 0.0) return true;
    return bt.imag() > (bt.real() / at.real()) * at.imag();
}

bool proportional_nonnegative(cplx z, cplx w, bool strict)
{
    const cplx p = z * std::conj(w);
    const bool on_ray = std::abs(p.imag()) <= 1e-12 * std::abs(z) * std::abs(w);
    return on_ray && (strict ? p.real() > 0.0 : p.real() >= 0.0);
}

LemABCase classify_lemAB_case(cplx a, cplx b)
{
    const double prod = a.imag() * b.imag();
    if (prod < 0.0) return LemABCase::Case2;
    const bool ra = a.real() >= 0.0;
    const bool rb = b.real() >= 0.0;
    if (ra && rb) return LemABCase::Case1;
    if (ra) return LemABCase::Case2;
    if (rb) return LemABCase::Case3;
    return LemABCase::Case4;
}

LemABConstants compute_lemAB_constants(cplx a, cplx b)
{
    if (!satisfies_condition_ab(a, b))
        throw std::invalid_argument("(a, b) = (" + fmt_c(a) + ", " + fmt_c(b) +
                                    ") does not satisfy condition (ab)");
    const double ra = a.real(), ia = a.imag();
    const double rb = b.real(), ib = b.imag();
    const double b_scale = std::abs(ib) + std::abs(rb);

    LemABConstants k;
    k.case_id = classify_lemAB_case(a, b);
    switch (k.case_id) {
    case LemABCase::Case1: {
        // (Re) + (|Im|): C1 + (Re a + |Im a|)C3 + (Re b - δ + |Im b|)C4 <= 2 C0
        k.gamma = 1.0;
        k.delta_star = 0.5 * std::min(1.0, b_scale);
        k.L = std::min(ra + std::abs(ia), rb - k.delta_star + std::abs(ib));
        k.M = 2.0;
        break;
    }
    case LemABCase::Case2: {
        // (Re) - (Re b - γ)/Im b · (Im)
        const double base = (ra * ib - rb * ia) / ib;
        const double slope = ia / ib;
        k.gamma = 1.0;
        if (slope < 0.0) k.gamma = std::min(1.0, 0.5 * base / -slope);
        k.delta_star = 0.5 * std::min({1.0, k.gamma, b_scale});
        k.L = std::min(base + k.gamma * slope, k.gamma - k.delta_star);
        k.M = (std::abs(rb) + std::abs(ib) + k.gamma) / std::abs(ib);
        break;
    }
    case LemABCase::Case3: {
        // (Re) - (Re a - γ)/Im a · (Im)
        k.gamma = 1.0;
        const double c4 = (rb * ia - ra * ib + k.gamma * ib) / ia;
        k.delta_star = 0.5 * std::min({1.0, k.gamma, b_scale, c4});
        k.L = std::min(k.gamma, c4 - k.delta_star);
        k.M = (std::abs(ra) + std::abs(ia) + k.gamma) / std::abs(ia);
        break;
    }
    case LemABCase::Case4: {
        // (Re) + max{(|Re a|+γ)/|Im a|, (|Re b|+γ)/|Im b|} · (|Im|)
        k.gamma = 1.0;
        k.delta_star = 0.5 * std::min({1.0, k.gamma, b_scale});
        k.L = k.gamma - k.delta_star;
        k.M = (std::abs(ra) + std::abs(ia) + k.gamma) / std::abs(ia) +
              (std::abs(rb) + std::abs(ib) + k.gamma) / std::abs(ib);
        break;
    }
    }
    return k;
}

Lemeap2Constants compute_lemeap2_constants(const CoefficientTriple& t, double R)
{
    t.validate();
    if (t.b.imag() == 0.0) throw std::invalid_argument("Im(b) must be nonzero");
    if (t.a.real() <= 0.0 && t.a.imag() == 0.0)
        throw std::invalid_argument("Im(a) must be nonzero when Re(a) <= 0");
    if (!(R >= 0.0) || !std::isfinite(R)) throw std::invalid_argument("R must be finite, >= 0");

    Lemeap2Constants k;
    k.R = R;
    k.A = std::max(1.0, (1.0 + std::abs(t.b) + R * R * std::abs(t.c)) / std::abs(t.b.imag()));
    // Twice the ratio keeps A0 = A|Im a| + Re a strictly positive.
    if (t.a.real() < 0.0) k.A = std::max(k.A, 2.0 * std::abs(t.a.real()) / std::abs(t.a.imag()));
    k.A0 = k.A * std::abs(t.a.imag()) + t.a.real();
    k.M = 4.0 * k.A * k.A * std::max({2.0, 1.0 / k.A0, 1.0 / std::min(1.0, k.A0)});
    return k;
}

HypothesisReport check_existence_thm1(cplx b, double C_P)
{
    if (!(C_P > 0.0)) throw std::invalid_argument("Poincare constant must be positive");
    HypothesisReport r{TheoremId::Exist1, false, {}};
    const double threshold = -1.0 / (C_P * C_P);
    if (b.real() >= 0.0) {
        r.satisfied = true;
        r.witness = "Re(b) >= 0";
    } else if (b.imag() != 0.0) {
        r.satisfied = true;
        r.witness = "Re(b) < 0 with Im(b) != 0";
    } else if (b.real() > threshold) {
        r.satisfied = true;
        std::ostringstream os;
        os << "-1/C_P^2 = " << threshold << " < Re(b) = " << b.real() << " < 0";
        r.witness = os.str();
    } else {
        std::ostringstream os;
        os << "Re(b) = " << b.real() << " <= -1/C_P^2 = " << threshold << " and Im(b) = 0";
        r.witness = os.str();
    }
    return r;
}

HypothesisReport check_existence_thm2(const CoefficientTriple& t)
{
    HypothesisReport r{TheoremId::Exist2, false, {}};
    if (!(t.a.imag() <= 0.0)) {
        r.witness = "Im(a) > 0";
    } else if (!(t.b.imag() < 0.0)) {
        r.witness = "Im(b) >= 0";
    } else if (!(t.c.imag() <= 0.0)) {
        r.witness = "Im(c) > 0";
    } else if (t.a.real() <= 0.0 && !(t.a.imag() < 0.0)) {
        r.witness = "Re(a) <= 0 and Im(a) = 0";
    } else {
        r.satisfied = true;
        r.witness = t.a.real() > 0.0 ? "Im(a) <= 0, Im(b) < 0, Im(c) <= 0, Re(a) > 0"
                                     : "Im(a) < 0, Im(b) < 0, Im(c) <= 0";
    }
    return r;
}

HypothesisReport check_existence_thm3(const CoefficientTriple& t)
{
    HypothesisReport r{TheoremId::Exist3, false, {}};
    if (t.c != cplx{0.0, 0.0}) {
        r.witness = "c != 0";
    } else if (!in_admissible_set(t.a)) {
        r.witness = "a lies on the closed ray {Re <= 0, Im = 0}";
    } else if (!in_admissible_set(t.b)) {
        r.witness = "b lies on the closed ray {Re <= 0, Im = 0}";
    } else if (!satisfies_condition_ab(t.a, t.b)) {
        r.witness = "Im(a)Im(b) < 0 and Re(b) <= (Im(b)/Im(a))Re(a)";
    } else {
        r.satisfied = true;
        r.witness = "(a, b) satisfies (ab), c = 0";
    }
    return r;
}

HypothesisReport check_uniqueness(const CoefficientTriple& t)
{
    const cplx zero{0.0, 0.0};
    const cplx ab = t.a * std::conj(t.b);
    const cplx ac = t.a * std::conj(t.c);
    const cplx bc = t.b * std::conj(t.c);

    if (t.a != zero && t.a.real() >= 0.0 && ab.real() >= 0.0 && ac.real() >= 0.0)
        return {TheoremId::Uni1, true, "a != 0, Re(a) >= 0, Re(a conj b) >= 0, Re(a conj c) >= 0"};
    if (t.b != zero && t.b.real() >= 0.0 && proportional_nonnegative(t.a, t.b) && bc.real() >= 0.0)
        return {TheoremId::Uni2, true, "b != 0, Re(b) >= 0, a = k b with k >= 0, Re(b conj c) >= 0"};
    if (t.c != zero && t.c.real() >= 0.0 && proportional_nonnegative(t.a, t.c, true) &&
        bc.real() >= 0.0)
        return {TheoremId::Uni3, true, "c != 0, Re(c) >= 0, a = k c with k > 0, Re(b conj c) >= 0"};

    std::ostringstream os;
    os << "no uniqueness case holds: Re(a) = " << t.a.real() << ", Re(a conj b) = " << ab.real()
       << ", Re(a conj c) = " << ac.real() << ", Re(b conj c) = " << bc.real();
    return {TheoremId::Uni1, false, os.str()};
}

}  // namespace snls
