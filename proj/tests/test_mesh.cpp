#include "support.hpp"

#include "snls/mesh.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace snls;
using test::pi;

TEST_CASE("grid construction")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {3});
    CHECK(g->axis(0).h == doctest::Approx(0.25));
    CHECK(g->node_count(BoundaryKind::Dirichlet) == 3);
    CHECK(g->coord(BoundaryKind::Dirichlet, 0, 0) == doctest::Approx(0.25));
    CHECK(g->coord(BoundaryKind::Dirichlet, 0, 1) == doctest::Approx(0.5));
    CHECK(g->coord(BoundaryKind::Dirichlet, 0, 2) == doctest::Approx(0.75));
    CHECK(g->node_count(BoundaryKind::Neumann) == 5);

    const auto r = build_grid(Domain::rectangle(0, 1, 0, 2), {3, 7});
    CHECK(r->axis(0).h == doctest::Approx(0.25));
    CHECK(r->axis(1).h == doctest::Approx(0.25));
    CHECK(r->measure() == doctest::Approx(2.0));

    CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), {1}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(Domain::interval(1.0, 0.0), {8}), std::invalid_argument);

    double total = 0.0;
    for (double w : r->quadrature_weights()) total += w;
    CHECK(total == doctest::Approx(2.0));
}

TEST_CASE("discrete Laplacian stencil values")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {3});
    DiscreteLaplacian L(g, BoundaryKind::Dirichlet);
    std::vector<cplx> u(3, 1.0), out(3);
    L.apply(u, out);
    CHECK(out[0].real() == doctest::Approx(16.0));
    CHECK(out[1].real() == doctest::Approx(0.0));
    CHECK(out[2].real() == doctest::Approx(16.0));

    DiscreteLaplacian N(g, BoundaryKind::Neumann);
    std::vector<cplx> c(5, cplx{2.0, -1.0}), outn(5);
    N.apply(c, outn);
    for (auto z : outn) CHECK(std::abs(z) <= 1e-12);

    // 2-D: constants are annihilated under Neumann as well
    const auto r = build_grid(Domain::rectangle(0, 1, 0, 2), {5, 9});
    DiscreteLaplacian N2(r, BoundaryKind::Neumann);
    std::vector<cplx> c2(N2.size(), 3.0), out2(N2.size());
    N2.apply(c2, out2);
    for (auto z : out2) CHECK(std::abs(z) <= 1e-10);
}

TEST_CASE("apply agrees with the assembled matrix and with the dense test stencil")
{
    for (auto bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
        const auto g = build_grid(Domain::rectangle(-1, 1, 0, 0.5), {7, 5});
        DiscreteLaplacian L(g, bc);
        const Field u = test::random_field(g, bc, 5);
        std::vector<cplx> out(L.size());
        L.apply(u.values, out, 0.3);
        const auto M = L.matrix(0.3);
        Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(u.values.data(), static_cast<Eigen::Index>(u.size()));
        const Eigen::VectorXcd y = M.cast<cplx>() * x;
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - y(static_cast<Eigen::Index>(i))) <= 1e-9);
        if (bc == BoundaryKind::Dirichlet) {
            Eigen::MatrixXd D = test::dense_dirichlet_laplacian(*g);
            D.diagonal().array() += 0.3;
            CHECK((Eigen::MatrixXd(M) - D).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("Dirichlet eigenvalues follow the closed form")
{
    const std::size_t n = 8;
    const auto g = build_grid(Domain::interval(0.0, 1.0), {n});
    const Eigen::MatrixXd A(DiscreteLaplacian(g, BoundaryKind::Dirichlet).matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double h = g->axis(0).h;
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = std::sin(static_cast<double>(k) * pi() * h / 2.0);
        CHECK(es.eigenvalues()(static_cast<Eigen::Index>(k - 1)) == doctest::Approx(4.0 / (h * h) * s * s).epsilon(1e-12));
    }
}

TEST_CASE("weighted form is symmetric and summation by parts holds")
{
    for (auto bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
        const auto g = build_grid(Domain::rectangle(0, 1, 0, 1.5), {9, 12});
        DiscreteLaplacian L(g, bc);
        const Eigen::MatrixXd S(L.symmetric_form(0.0));
        CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * S.cwiseAbs().maxCoeff());

        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Field u = test::random_field(g, bc, seed);
            Field Lu(g, bc);
            L.apply(u.values, Lu.values);
            const double lhs = inner(Lu, u).real();
            const double h1 = h1_seminorm(u);
            CHECK(std::abs(lhs - h1 * h1) <= 1e-12 * h1 * h1);
        }
    }
}

TEST_CASE("Poincare constant")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {64});
    const auto est = poincare_constant(g);
    CHECK(std::abs(est.C_P - 1.0 / pi()) <= 0.01 / pi());
    const double h = g->axis(0).h;
    const double s = std::sin(pi() * h / 2.0);
    CHECK(est.lambda1 == doctest::Approx(4.0 / (h * h) * s * s).epsilon(1e-9));

    const auto g2 = build_grid(Domain::interval(0.0, 2.0), {129});
    CHECK(poincare_constant(g2).C_P == doctest::Approx(2.0 * est.C_P).epsilon(1e-3));

    const auto sq = build_grid(Domain::rectangle(0, 1, 0, 1), {48, 48});
    CHECK(poincare_constant(sq).C_P == doctest::Approx(1.0 / (pi() * std::sqrt(2.0))).epsilon(0.01));

    // second-order convergence of λ₁
    const double e1 = std::abs(poincare_constant(build_grid(Domain::interval(0, 1), {31})).lambda1 - pi() * pi());
    const double e2 = std::abs(poincare_constant(build_grid(Domain::interval(0, 1), {63})).lambda1 - pi() * pi());
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("discrete Poincare and Holder inequalities on random fields")
{
    const auto g = build_grid(Domain::rectangle(0, 2, 0, 1), {20, 11});
    const auto est = poincare_constant(g);
    const double m = 0.4;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Field u = test::random_field(g, BoundaryKind::Dirichlet, seed);
        CHECK(l2_norm(u) <= est.C_P * h1_seminorm(u) * (1.0 + 1e-9));
        const double lhs = std::pow(lp_norm(u, m + 1.0), m + 1.0);
        CHECK(lhs <= std::pow(g->measure(), (1.0 - m) / 2.0) * std::pow(l2_norm(u), m + 1.0) * (1.0 + 1e-12));
    }
    // equality for the first eigenvector
    Field phi(g, BoundaryKind::Dirichlet);
    for (std::size_t i = 0; i < phi.size(); ++i) phi.values[i] = est.eigenvector[i];
    CHECK(l2_norm(phi) == doctest::Approx(est.C_P * h1_seminorm(phi)).epsilon(1e-8));
}

TEST_CASE("norms of simple fields")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {255});
    const Field one = Field::from_function(g, BoundaryKind::Neumann, [](double, double) { return cplx{1.0}; });
    CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(one, 1.5) == doctest::Approx(1.0).epsilon(1e-12));

    const Field s = Field::from_function(g, BoundaryKind::Dirichlet,
                                         [](double x, double) { return cplx{std::sin(pi() * x)}; });
    const auto nn = norms(s, 1.5);
    CHECK(nn.l2 * nn.l2 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(nn.h1_semi * nn.h1_semi == doctest::Approx(pi() * pi() / 2.0).epsilon(1e-4));
    CHECK(nn.linf == doctest::Approx(1.0));
}

TEST_CASE("distance and eigenfunction weights")
{
    const auto g = build_grid(Domain::interval(0.0, 1.0), {3});
    const auto w = boundary_distance_weight(*g, 0.5);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(std::sqrt(0.5)));
    CHECK(boundary_distance(g->domain(), 0.5, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(boundary_distance_weight(*g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(boundary_distance_weight(*g, 0.0), std::invalid_argument);
    const auto sq = build_grid(Domain::rectangle(0, 1, 0, 1), {5, 5});
    CHECK_THROWS_AS(boundary_distance_weight(*sq, 1.0), std::invalid_argument);

    const auto fine = build_grid(Domain::interval(0.0, 1.0), {128});
    const auto phi = first_eigen_weight(fine, 1.0 - 1e-12);  // α close to 1 recovers φ₁ itself
    const auto est = poincare_constant(fine);
    double max_dev = 0.0, lo = 1e9, hi = 0.0;
    for (std::size_t i = 0; i < 128; ++i) {
        const double x = fine->coord(BoundaryKind::Dirichlet, 0, i);
        // the discrete eigenvector is exactly a sampled sine; compare against
        // the sine normalized by its nodal maximum
        const double ref = std::sin(pi() * x) / std::sin(pi() * 64.0 / 129.0);
        max_dev = std::max(max_dev, std::abs(est.eigenvector[i] - ref));
        const double ratio = est.eigenvector[i] / std::min(x, 1.0 - x);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        CHECK(phi[i] == doctest::Approx(est.eigenvector[i]).epsilon(1e-9));
    }
    CHECK(max_dev <= 1e-6);
    CHECK(lo >= 1.0);
    CHECK(hi <= pi() + 1e-12);

    const auto half = first_eigen_weight(build_grid(Domain::interval(0.0, 1.0), {127}), 0.5);
    CHECK(half[63] == doctest::Approx(1.0));
}
