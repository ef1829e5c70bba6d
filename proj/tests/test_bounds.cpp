#include "support.hpp"

#include "snls/bounds.hpp"

#include <doctest.h>

using namespace snls;
using namespace std::complex_literals;
using test::pi;

namespace {

Problem problem_1d(std::size_t n, CoefficientTriple t, const std::function<cplx(double, double)>& F)
{
    Problem p;
    p.grid = build_grid(Domain::interval(0.0, 1.0), {n});
    p.coeffs = t;
    p.F = Field::from_function(p.grid, p.bc, F);
    return p;
}

// ⟨G(u), u⟩ with G(u) = -Δ_h u + f(u) - F, assembled from the dense stencil.
cplx pairing_oracle(const Problem& p, const Field& u)
{
    const Eigen::MatrixXd L = test::dense_dirichlet_laplacian(*p.grid);
    const double h = p.grid->axis(0).h;
    cplx sum{};
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        cplx r = -p.F.values[ii] + p.coeffs.b * u.values[ii];
        for (Eigen::Index j = 0; j < L.cols(); ++j) r += L(i, j) * u.values[static_cast<std::size_t>(j)];
        const double ru = std::abs(u.values[ii]);
        if (ru > 0.0) r += p.coeffs.a * std::pow(ru, p.coeffs.m - 1.0) * u.values[ii];
        sum += h * r * std::conj(u.values[ii]);
    }
    return sum;
}

}  // namespace

TEST_CASE("energy identities")
{
    auto p = problem_1d(40, {cplx{1, -1}, cplx{-0.5, 2}, 0.0, 0.4}, [](double, double) { return cplx{}; });
    const Field zero(p.grid, p.bc);
    const auto d0 = energy_identities(zero, p);
    CHECK(d0.re_defect == 0.0);
    CHECK(d0.im_defect == 0.0);

    // a random non-solution: the defects are the parts of ⟨G(u), u⟩
    p.F = test::random_field(p.grid, p.bc, 3);
    const Field u = test::random_field(p.grid, p.bc, 4);
    const auto d = energy_identities(u, p);
    const cplx o = pairing_oracle(p, u);
    CHECK(d.re_defect == doctest::Approx(std::abs(o.real())).epsilon(1e-10));
    CHECK(d.im_defect == doctest::Approx(std::abs(o.imag())).epsilon(1e-10));
    CHECK(d.re_defect <= d.residual_bound * (1.0 + 1e-12));
    CHECK(d.im_defect <= d.residual_bound * (1.0 + 1e-12));

    // exact discrete linear solution
    auto lin = problem_1d(63, {0.0, 1.0, 0.0, 0.5}, [](double x, double) { return cplx{std::sin(pi() * x), x}; });
    const auto res = solve(lin, {});
    REQUIRE(res.converged);
    const auto dl = energy_identities(res.u, lin);
    const double scale = l2_norm(lin.F) * l2_norm(res.u);
    CHECK(dl.re_defect <= 1e-10 * scale);
    CHECK(dl.im_defect <= 1e-10 * scale);
}

TEST_CASE("largest root of the scalar bound inequality")
{
    CHECK(largest_root(1.0, 0.0, 0.5, 0.0) == 0.0);
    CHECK(largest_root(1.0, 0.0, 0.5, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(largest_root(2.0, 0.0, 0.5, 8.0) == doctest::Approx(2.0).epsilon(1e-12));
    // k > 0, c0 = 0: root of s^2 = k s^{m+1}, i.e. s = k^{1/(1-m)}
    CHECK(largest_root(1.0, 3.0, 0.5, 0.0) == doctest::Approx(9.0).epsilon(1e-12));
    const double s = largest_root(1.5, 2.0, 0.3, 5.0);
    CHECK(1.5 * s * s - 2.0 * std::pow(s, 1.3) - 5.0 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(largest_root(0.0, 1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("gradient bound radius")
{
    const double C_P = 1.0 / pi();
    // Re(a) >= 0, Re(b) >= 0: ‖∇u‖² <= ‖F‖‖u‖ <= C_P‖F‖‖∇u‖, so C = C_P‖F‖
    const auto g1 = gradient_bound_radius(cplx{1, 2}, cplx{0.5, -1}, 0.5, C_P, 1.0, 3.0);
    CHECK(g1.step == 1);
    CHECK(g1.radius == doctest::Approx(C_P * 3.0).epsilon(1e-12));
    CHECK(g1.radius <= std::sqrt(2.0) * C_P * 3.0);
    CHECK(gradient_bound_radius(1.0, 1.0, 0.5, C_P, 1.0, 0.0).radius == 0.0);

    CHECK(gradient_bound_radius(1.0, cplx{-2, 1}, 0.5, C_P, 1.0, 1.0).step == 2);
    CHECK(gradient_bound_radius(1.0, -1.0, 0.5, C_P, 1.0, 1.0).step == 3);
    CHECK_THROWS_AS(gradient_bound_radius(1.0, -10.0, 0.5, C_P, 1.0, 1.0), HypothesisError);
}

TEST_CASE("certificates: trivial, falsifiable and hypothesis-guarded")
{
    auto p = problem_1d(50, {1.0, -1i, 0.0, 0.5}, [](double, double) { return cplx{}; });
    const Field zero(p.grid, p.bc);
    const auto c0 = certify_thm_bound2(zero, p);
    CHECK(c0.lhs == 0.0);
    CHECK(c0.rhs == 0.0);
    CHECK(c0.verdict);

    p.F = Field::from_function(p.grid, p.bc, [](double x, double) { return cplx{1.0 + x, -x}; });
    const auto res = solve(p, {});
    REQUIRE(res.converged);
    CHECK(certify_thm_bound2(res.u, p).verdict);
    Field big = res.u;
    for (auto& z : big.values) z *= 1e6;
    CHECK_FALSE(certify_thm_bound2(big, p).verdict);

    const double C_P = poincare_constant(p.grid).C_P;
    const auto g = certify_thm_bound1(res.u, p, C_P);
    CHECK(g.verdict);
    CHECK(g.constants_used.count("C_P") == 1);
    CHECK_FALSE(certify_thm_bound1(big, p, C_P).verdict);

    auto q = problem_1d(50, {cplx{1, 1}, cplx{2, 1}, 0.0, 0.5}, [](double, double) { return cplx{}; });
    CHECK(certify_thm_bound3(Field(q.grid, q.bc), q).verdict);
    q.F = Field::from_function(q.grid, q.bc, [](double x, double) { return cplx{std::cos(3 * x), 1.0}; });
    const auto rq = solve(q, {});
    REQUIRE(rq.converged);
    CHECK(certify_thm_bound3(rq.u, q).verdict);

    q.coeffs.a = -1.0;
    CHECK_THROWS_AS(certify_thm_bound3(rq.u, q), HypothesisError);
    q.coeffs = {1.0, 1.0, 0.0, 0.5};
    CHECK_THROWS_AS(certify_thm_bound2(rq.u, q), HypothesisError);
    Problem neu = p;
    neu.bc = BoundaryKind::Neumann;
    neu.F = Field(p.grid, BoundaryKind::Neumann);
    CHECK_THROWS_AS(certify_thm_bound1(Field(p.grid, BoundaryKind::Neumann), neu, C_P), HypothesisError);
}

TEST_CASE("randomized certificate sweep, small")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 30; ++k) {
        CoefficientTriple t{cplx{2.0 * U(rng) + 0.5, -std::abs(U(rng))}, cplx{U(rng), -std::abs(U(rng)) - 0.05}, 0.0,
                            0.2 + 0.6 * std::abs(U(rng))};
        const double amp = 5.0 * std::abs(U(rng));
        auto p = problem_1d(32, t, [&](double x, double) { return amp * cplx{std::sin(3 * x), std::cos(2 * x)}; });
        const auto res = solve(p, {});
        if (!res.converged) continue;
        ++checked;
        CHECK(certify_thm_bound2(res.u, p).verdict);
        CHECK(certify_thm_bound1(res.u, p, poincare_constant(p.grid).C_P).verdict);
        if (satisfies_condition_ab(t.a, t.b)) CHECK(certify_thm_bound3(res.u, p).verdict);
    }
    CHECK(checked >= 25);
}

TEST_CASE("support measure")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {99});
    CHECK(support_measure(Field(g, BoundaryKind::Dirichlet), 1e-12).measure == 0.0);
    const Field one = Field::from_function(g, BoundaryKind::Neumann, [](double, double) { return cplx{1.0}; });
    CHECK(support_measure(one, 0.5).measure == doctest::Approx(1.0));
    const Field bump = Field::from_function(g, BoundaryKind::Dirichlet,
                                            [](double x, double) { return x < 0.3 ? cplx{1.0 - x / 0.3} : cplx{}; });
    const auto s = support_measure(bump, 1e-12);
    CHECK(std::abs(s.bounding_radius - 0.3) <= g->axis(0).h * (1.0 + 1e-9));
    CHECK_THROWS_AS(support_measure(bump, 0.0), std::invalid_argument);
}
