#include "support.hpp"

#include "snls/nonlinearity.hpp"

#include <doctest.h>

using namespace snls;
using namespace std::complex_literals;

TEST_CASE("pointwise nonlinearity")
{
    CHECK(eval_f({1.0, 2.0, 3.0, 0.5}, 0.0, 1.0) == cplx{0.0});
    CHECK(std::abs(eval_f({1.0, 0.0, 0.0, 0.5}, 4.0, 0.0) - cplx{2.0}) <= 1e-15);
    CHECK(std::abs(eval_f({1i, 2.0, 1.0, 0.5}, 1.0, 3.0) - cplx{11.0, 1.0}) <= 1e-14);
    CHECK(singular_part(0.0, 0.3) == cplx{0.0});
    // |f0(u)| = |u|^m
    CHECK(std::abs(singular_part(cplx{3, 4}, 0.5)) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("truncated nonlinearity")
{
    NonlinearityParams p;
    p.coeffs = {1i, 2.0, 1.0, 0.5};
    p.delta_shift = 0.7;
    const cplx u = 1.0;
    CHECK(eval_f_trunc(p, 10.0, u, 3.0) == eval_f(p.coeffs, u, 3.0) - p.delta_shift * u);

    NonlinearityParams q;
    q.coeffs = {1.0, 0.0, 0.0, 0.5};
    CHECK(std::abs(eval_f_trunc(q, 1.0, 2.0, 0.0) - cplx{1.0}) <= 1e-15);

    // continuity across |u| = ell and the uniform bound
    NonlinearityParams r;
    r.coeffs = {cplx{1, -2}, cplx{-1, 0.5}, cplx{0.3, -0.1}, 0.4};
    r.delta_shift = 0.25;
    r.V = {1.5};
    const double ell = 2.0;
    const cplx dir = std::polar(1.0, 0.7);
    const cplx in = eval_f_trunc(r, ell, ell * (1.0 - 1e-12) * dir, 1.5);
    const cplx out = eval_f_trunc(r, ell, ell * (1.0 + 1e-12) * dir, 1.5);
    CHECK(std::abs(in - out) <= 1e-9);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const cplx z{U(rng), U(rng)};
        CHECK(std::abs(eval_f_trunc(r, ell, z, 1.5)) <= truncation_bound(r, ell) * (1.0 + 1e-12));
    }
}

TEST_CASE("monotonicity pairing")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {50});
    const Field u1 = test::random_field(g, BoundaryKind::Dirichlet, 1);
    const auto same = monotonicity_pairing(u1, u1, 0.5);
    CHECK(same.pairing == 0.0);
    CHECK(same.lower_integral == 0.0);

    for (double m : {0.1, 0.5, 0.9}) {
        const auto C = monotonicity_constant(m);
        // sampled min equals m 2^{1-m}, the value at w = -z
        CHECK(C.sampled_min == doctest::Approx(m * std::pow(2.0, 1.0 - m)).epsilon(1e-6));
        for (std::uint64_t s = 0; s < 20; ++s) {
            const Field a = test::random_field(g, BoundaryKind::Dirichlet, 10 + s, 3.0);
            const Field b = test::random_field(g, BoundaryKind::Dirichlet, 100 + s, 0.2);
            const auto pr = monotonicity_pairing(a, b, m);
            CHECK(pr.pairing >= C.lower_bound * pr.lower_integral);
        }
    }
}

TEST_CASE("field application")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {10});
    NonlinearityParams p;
    p.coeffs = {cplx{1, 1}, 2.0, 0.5, 0.5};
    p.V.assign(10, 2.0);
    const Field u = test::random_field(g, BoundaryKind::Dirichlet, 4);
    Field out(g, BoundaryKind::Dirichlet);
    apply_f(p, u, out);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(out.values[i] == eval_f(p.coeffs, u.values[i], 2.0));
    apply_f_trunc(p, 0.5, u, out);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(out.values[i] == eval_f_trunc(p, 0.5, u.values[i], 2.0));
}
