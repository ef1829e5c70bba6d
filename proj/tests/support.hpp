#pragma once

// Test-only helpers. The Newton oracle assembles its own dense Laplacian and
// nonlinearity Jacobian so it shares no code path with the library solver.

#include "snls/solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace snls::test {

inline double pi() { return std::acos(-1.0); }

// Dense -Δ_h on Dirichlet interior nodes, written out from the 3/5-point stencil.
inline Eigen::MatrixXd dense_dirichlet_laplacian(const Grid& g)
{
    const std::size_t nx = g.axis(0).n;
    const std::size_t ny = g.dim() == 2 ? g.axis(1).n : 1;
    const double ihx = 1.0 / (g.axis(0).h * g.axis(0).h);
    const double ihy = g.dim() == 2 ? 1.0 / (g.axis(1).h * g.axis(1).h) : 0.0;
    const auto N = static_cast<Eigen::Index>(nx * ny);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const auto k = static_cast<Eigen::Index>(j * nx + i);
            L(k, k) = 2.0 * ihx + 2.0 * ihy;
            if (i > 0) L(k, k - 1) = -ihx;
            if (i + 1 < nx) L(k, k + 1) = -ihx;
            if (j > 0) L(k, k - static_cast<Eigen::Index>(nx)) = -ihy;
            if (j + 1 < ny) L(k, k + static_cast<Eigen::Index>(nx)) = -ihy;
        }
    return L;
}

struct NewtonResult {
    std::vector<cplx> u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton with backtracking on ‖G‖ for
//   G(u) = -Δ_h u + a|u|^{m-1}u + bu + cV²u - F = 0,
// unknowns split as [Re u; Im u].
inline NewtonResult newton_from(const Problem& p, const std::vector<cplx>* start, double tol, int max_iter)
{
    const auto L = dense_dirichlet_laplacian(*p.grid);
    const auto n = L.rows();
    const auto& t = p.coeffs;
    const double m = t.m;

    auto residual = [&](const Eigen::VectorXcd& u) {
        Eigen::VectorXcd r = L.cast<cplx>() * u;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = p.potential(static_cast<std::size_t>(i));
            const double ru = std::abs(u(i));
            const cplx sing = ru > 0.0 ? std::pow(ru, m - 1.0) * u(i) : cplx{};
            r(i) += t.a * sing + t.b * u(i) + t.c * v * v * u(i) - p.F.values[static_cast<std::size_t>(i)];
        }
        return r;
    };

    // start from the linear problem with a moved onto the diagonal
    Eigen::MatrixXcd A0 = L.cast<cplx>();
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = p.potential(static_cast<std::size_t>(i));
        A0(i, i) += t.a + t.b + t.c * v * v;
        rhs(i) = p.F.values[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXcd u = A0.partialPivLu().solve(rhs);
    if (start) u = Eigen::Map<const Eigen::VectorXcd>(start->data(), n);

    NewtonResult out;
    Eigen::VectorXcd r = residual(u);
    double rn = r.norm();
    const double scale = std::max(1.0, rhs.norm());
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if (rn <= tol * scale) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        J.topLeftCorner(n, n) = L;
        J.bottomRightCorner(n, n) = L;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = p.potential(static_cast<std::size_t>(i));
            // linear coefficient k δu and conjugate coefficient κ conj(δu)
            cplx k = t.b + t.c * v * v;
            cplx kappa{};
            const double ru = std::abs(u(i));
            if (ru > 0.0) {
                k += t.a * (0.5 * (m + 1.0) * std::pow(ru, m - 1.0));
                kappa = t.a * (0.5 * (m - 1.0) * std::pow(ru, m - 3.0) * u(i) * u(i));
            }
            J(i, i) += k.real() + kappa.real();
            J(i, n + i) += -k.imag() + kappa.imag();
            J(n + i, i) += k.imag() + kappa.imag();
            J(n + i, n + i) += k.real() - kappa.real();
        }
        Eigen::VectorXd R(2 * n);
        R << r.real(), r.imag();
        const Eigen::VectorXd d = J.partialPivLu().solve(-R);
        Eigen::VectorXcd du(n);
        for (Eigen::Index i = 0; i < n; ++i) du(i) = cplx(d(i), d(n + i));
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
            const Eigen::VectorXcd trial = u + step * du;
            const Eigen::VectorXcd rt = residual(trial);
            if (rt.norm() < (1.0 - 1e-4 * step) * rn) {
                u = trial;
                r = rt;
                rn = rt.norm();
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    out.converged = out.converged || rn <= tol * scale;
    out.residual = rn;
    out.u.assign(u.data(), u.data() + n);
    return out;
}

// Newton from the linear solve; if that stalls, continuation in a from 0,
// each stage started at the previous solution, with finer steps on failure.
inline NewtonResult newton_oracle(const Problem& p, double tol = 1e-13, int max_iter = 200)
{
    auto direct = newton_from(p, nullptr, tol, max_iter);
    if (direct.converged) return direct;
    for (int stages = 8; stages <= 256; stages *= 2) {
        Problem q = p;
        q.coeffs.a = 0.0;
        auto r = newton_from(q, nullptr, tol, max_iter);
        for (int k = 1; k <= stages && r.converged; ++k) {
            q.coeffs.a = p.coeffs.a * (static_cast<double>(k) / stages);
            r = newton_from(q, &r.u, tol, max_iter);
        }
        if (r.converged) return r;
    }
    return direct;
}

inline double l2_distance(const Field& u, const std::vector<cplx>& v)
{
    Field d = u;
    for (std::size_t i = 0; i < d.size(); ++i) d.values[i] -= v[i];
    return l2_norm(d);
}

inline Field random_field(const GridPtr& g, BoundaryKind bc, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-scale, scale);
    Field f(g, bc);
    for (auto& z : f.values) z = {U(rng), U(rng)};
    return f;
}

}  // namespace snls::test
