#include "snls/weighted.hpp"

#include <fmt/format.h>

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace snls {

namespace {

constexpr long kBoundary = -1;

struct EdgeGeometry {
    std::size_t nx = 0, ny = 1;  // interior counts (ny = 1 on an interval)
    std::size_t fx = 0, fy = 1;  // full counts
    bool two_d = false;
    double hx = 0.0, hy = 1.0;

    explicit EdgeGeometry(const Grid& g)
    {
        two_d = g.dim() == 2;
        nx = g.axis(0).n;
        fx = nx + 2;
        hx = g.axis(0).h;
        if (two_d) {
            ny = g.axis(1).n;
            fy = ny + 2;
            hy = g.axis(1).h;
        }
    }

    std::size_t full(std::size_t i, std::size_t j) const { return i + j * fx; }
    std::size_t interior_to_full(std::size_t idx) const
    {
        const std::size_t i = idx % nx, j = idx / nx;
        return full(i + 1, two_d ? j + 1 : 0);
    }
};

// fn(axis, edge_id, ia, ib, fa, fb, h, transverse)
template <class Fn>
void for_each_edge(const EdgeGeometry& G, Fn&& fn)
{
    std::size_t id = 0;
    for (std::size_t j = 0; j < G.ny; ++j) {
        const std::size_t jf = G.two_d ? j + 1 : 0;
        for (std::size_t e = 0; e <= G.nx; ++e, ++id) {
            const long ia = e >= 1 ? static_cast<long>(e - 1 + j * G.nx) : kBoundary;
            const long ib = e + 1 <= G.nx ? static_cast<long>(e + j * G.nx) : kBoundary;
            fn(0, id, ia, ib, G.full(e, jf), G.full(e + 1, jf), G.hx, G.two_d ? G.hy : 1.0);
        }
    }
    if (!G.two_d) return;
    id = 0;
    for (std::size_t i = 0; i < G.nx; ++i) {
        for (std::size_t e = 0; e <= G.ny; ++e, ++id) {
            const long ia = e >= 1 ? static_cast<long>(i + (e - 1) * G.nx) : kBoundary;
            const long ib = e + 1 <= G.ny ? static_cast<long>(i + e * G.nx) : kBoundary;
            fn(1, id, ia, ib, G.full(i + 1, e), G.full(i + 1, e + 1), G.hy, G.hx);
        }
    }
}

cplx value_at(const Field& u, long idx) { return idx == kBoundary ? cplx{0.0, 0.0} : u.values[idx]; }

void require_dirichlet(const Field& f, const WeightConfig& w)
{
    if (f.bc != BoundaryKind::Dirichlet) throw std::invalid_argument("weighted mode needs Dirichlet fields");
    if (f.grid != w.grid) throw std::invalid_argument("field and weight live on different grids");
}

Field sine_mode(const GridPtr& grid, std::size_t k, std::size_t l)
{
    const auto& d = grid->domain();
    return Field::from_function(grid, BoundaryKind::Dirichlet, [&](double x, double y) {
        double s = std::sin(static_cast<double>(k) * std::numbers::pi * (x - d.bounds[0].first) /
                            (d.bounds[0].second - d.bounds[0].first));
        if (d.dim() == 2)
            s *= std::sin(static_cast<double>(l) * std::numbers::pi * (y - d.bounds[1].first) /
                          (d.bounds[1].second - d.bounds[1].first));
        return cplx{s, 0.0};
    });
}

// Mode pairs ordered by continuum eigenvalue.
std::vector<std::pair<std::size_t, std::size_t>> lowest_modes(const Grid& g, std::size_t count)
{
    std::vector<std::pair<std::size_t, std::size_t>> modes;
    if (g.dim() == 1) {
        for (std::size_t k = 1; k <= std::min(count, g.axis(0).n); ++k) modes.emplace_back(k, 1);
        return modes;
    }
    const double Lx = g.axis(0).hi - g.axis(0).lo, Ly = g.axis(1).hi - g.axis(1).lo;
    for (std::size_t k = 1; k <= std::min(count, g.axis(0).n); ++k)
        for (std::size_t l = 1; l <= std::min(count, g.axis(1).n); ++l) modes.emplace_back(k, l);
    auto ev = [&](const auto& p) {
        const double a = static_cast<double>(p.first) / Lx, b = static_cast<double>(p.second) / Ly;
        return a * a + b * b;
    };
    std::stable_sort(modes.begin(), modes.end(), [&](const auto& p, const auto& q) { return ev(p) < ev(q); });
    if (modes.size() > count) modes.resize(count);
    return modes;
}

}  // namespace

std::string_view to_string(WeightKind k)
{
    switch (k) {
    case WeightKind::BoundaryDistance: return "boundary_distance";
    case WeightKind::FirstEigenfunction: return "first_eigenfunction";
    case WeightKind::Constant: return "constant";
    }
    return "unknown";
}

WeightConfig make_weight(const GridPtr& grid, double alpha, WeightKind kind)
{
    if (!grid) throw std::invalid_argument("weight needs a grid");
    if (kind == WeightKind::Constant) return constant_weight(grid);
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const EdgeGeometry G(*grid);
    WeightConfig w;
    w.alpha = alpha;
    w.kind = kind;
    w.grid = grid;
    const std::size_t n = grid->node_count(BoundaryKind::Dirichlet);
    w.distance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = grid->node(BoundaryKind::Dirichlet, i);
        w.distance[i] = boundary_distance(grid->domain(), x, y);
    }
    w.nodal.assign(G.fx * G.fy, 0.0);
    if (kind == WeightKind::BoundaryDistance) {
        w.weight_field = boundary_distance_weight(*grid, alpha);
    } else {
        w.weight_field = first_eigen_weight(grid, alpha);
    }
    for (std::size_t i = 0; i < n; ++i) w.nodal[G.interior_to_full(i)] = w.weight_field[i];

    w.grad_weight[0].assign(G.ny * (G.nx + 1), 0.0);
    if (G.two_d) w.grad_weight[1].assign(G.nx * (G.ny + 1), 0.0);
    for_each_edge(G, [&](int axis, std::size_t id, long, long, std::size_t fa, std::size_t fb, double h, double) {
        w.grad_weight[axis][id] = (w.nodal[fb] - w.nodal[fa]) / h;
    });
    return w;
}

WeightConfig constant_weight(const GridPtr& grid)
{
    if (!grid) throw std::invalid_argument("weight needs a grid");
    const EdgeGeometry G(*grid);
    WeightConfig w;
    w.alpha = 0.0;
    w.kind = WeightKind::Constant;
    w.grid = grid;
    const std::size_t n = grid->node_count(BoundaryKind::Dirichlet);
    w.weight_field.assign(n, 1.0);
    w.nodal.assign(G.fx * G.fy, 1.0);
    w.distance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = grid->node(BoundaryKind::Dirichlet, i);
        w.distance[i] = boundary_distance(grid->domain(), x, y);
    }
    w.grad_weight[0].assign(G.ny * (G.nx + 1), 0.0);
    if (G.two_d) w.grad_weight[1].assign(G.nx * (G.ny + 1), 0.0);
    return w;
}

double weighted_norm(const Field& f, const WeightConfig& w, double exponent)
{
    require_dirichlet(f, w);
    if (!(exponent > 0.0)) throw std::invalid_argument("exponent must be positive");
    const auto q = f.grid->weights(BoundaryKind::Dirichlet);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += q[i] * w.weight_field[i] * std::pow(std::abs(f.values[i]), exponent);
    return s;
}

double hardy_lhs(const Field& v, const WeightConfig& w)
{
    require_dirichlet(v, w);
    const double a = w.kind == WeightKind::Constant ? 0.0 : w.alpha;
    const auto q = v.grid->weights(BoundaryKind::Dirichlet);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += q[i] * std::norm(v.values[i]) * std::pow(w.distance[i], a - 2.0);
    return s;
}

double weighted_energy(const Field& v, const WeightConfig& w)
{
    require_dirichlet(v, w);
    const EdgeGeometry G(*v.grid);
    double s = 0.0;
    for_each_edge(G, [&](int, std::size_t, long ia, long ib, std::size_t fa, std::size_t fb, double h, double t) {
        const double wbar = 0.5 * (w.nodal[fa] + w.nodal[fb]);
        s += t / h * wbar * std::norm(value_at(v, ib) - value_at(v, ia));
    });
    return s;
}

HardyReport hardy_check(const WeightConfig& w, std::size_t samples, std::uint64_t seed)
{
    const GridPtr& grid = w.grid;
    const auto& d = grid->domain();
    std::vector<std::pair<std::string, Field>> probes;
    for (std::size_t k = 1; k <= 3; ++k)
        probes.emplace_back("sine_" + std::to_string(k), sine_mode(grid, k, k));
    const double base = 0.5 * (1.0 - w.alpha);
    for (double off : {0.5, 1.0, 1.5}) {
        const double beta = base + off;
        probes.emplace_back(fmt::format("profile_beta_{:g}", beta),
                            Field::from_function(grid, BoundaryKind::Dirichlet, [&](double x, double y) {
                                double p = (x - d.bounds[0].first) * (d.bounds[0].second - x);
                                if (d.dim() == 2) p *= (y - d.bounds[1].first) * (d.bounds[1].second - y);
                                return cplx{std::pow(p, beta), 0.0};
                            }));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto modes = lowest_modes(*grid, 8);
    std::vector<Field> basis;
    for (const auto& [k, l] : modes) basis.push_back(sine_mode(grid, k, l));
    for (std::size_t s = 0; s < samples; ++s) {
        Field f(grid, BoundaryKind::Dirichlet);
        for (const auto& b : basis) {
            const double re = normal(rng);
            const double im = normal(rng);
            const cplx c{re, im};
            for (std::size_t i = 0; i < f.size(); ++i) f.values[i] += c * b.values[i];
        }
        probes.emplace_back("random_" + std::to_string(s), std::move(f));
    }

    HardyReport rep;
    for (const auto& [id, v] : probes) {
        const double rhs = weighted_energy(v, w);
        if (!(rhs > 0.0)) continue;
        const double ratio = hardy_lhs(v, w) / rhs;
        rep.ratios.emplace_back(id, ratio);
        if (ratio > rep.best_constant_estimate) {
            rep.best_constant_estimate = ratio;
            rep.worst_field_id = id;
        }
    }
    return rep;
}

double weighted_weak_residual(const Field& u, const Problem& problem, const WeightConfig& w, const Field& v)
{
    require_dirichlet(u, w);
    require_dirichlet(v, w);
    if (problem.grid != w.grid || problem.bc != BoundaryKind::Dirichlet)
        throw std::invalid_argument("weighted residual needs a Dirichlet problem on the weight grid");
    const EdgeGeometry G(*u.grid);
    double s = 0.0;
    for_each_edge(G, [&](int axis, std::size_t id, long ia, long ib, std::size_t fa, std::size_t fb, double h,
                         double t) {
        const cplx du = (value_at(u, ib) - value_at(u, ia)) / h;
        const cplx dv = (value_at(v, ib) - value_at(v, ia)) / h;
        const cplx vbar = 0.5 * (value_at(v, ia) + value_at(v, ib));
        const double wbar = 0.5 * (w.nodal[fa] + w.nodal[fb]);
        s += t * h * (wbar * du * std::conj(dv) + du * std::conj(vbar) * w.grad_weight[axis][id]).real();
    });
    const auto q = u.grid->weights(BoundaryKind::Dirichlet);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const cplx g = eval_f(problem.coeffs, u.values[i], problem.potential(i)) - problem.F.values[i];
        s += q[i] * w.weight_field[i] * (g * std::conj(v.values[i])).real();
    }
    return s;
}

double transport_term(const Field& u, const WeightConfig& w)
{
    require_dirichlet(u, w);
    const EdgeGeometry G(*u.grid);
    double s = 0.0;
    for_each_edge(G, [&](int axis, std::size_t id, long ia, long ib, std::size_t, std::size_t, double h, double t) {
        const cplx du = (value_at(u, ib) - value_at(u, ia)) / h;
        const cplx ubar = 0.5 * (value_at(u, ia) + value_at(u, ib));
        s += t * h * (du * std::conj(ubar)).real() * w.grad_weight[axis][id];
    });
    return s;
}

double transport_identity_value(const Field& u, const WeightConfig& w)
{
    require_dirichlet(u, w);
    if (w.kind != WeightKind::FirstEigenfunction)
        throw std::invalid_argument("transport identity is stated for the eigenfunction weight");
    const EdgeGeometry G(*u.grid);
    const double a = w.alpha;
    const double lambda1 = dirichlet_lambda1(*u.grid);
    std::vector<double> phi(w.nodal.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::pow(w.nodal[i], 1.0 / a);
    const auto q = u.grid->weights(BoundaryKind::Dirichlet);
    double s = 0.0;
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        const std::size_t f = G.interior_to_full(idx);
        double grad_sq = 0.0;
        const double gx = (phi[f + 1] - phi[f - 1]) / (2.0 * G.hx);
        grad_sq += gx * gx;
        if (G.two_d) {
            const double gy = (phi[f + G.fx] - phi[f - G.fx]) / (2.0 * G.hy);
            grad_sq += gy * gy;
        }
        const double u2 = std::norm(u.values[idx]);
        s += q[idx] * u2 *
             (0.5 * a * lambda1 * std::pow(phi[f], a) + 0.5 * a * (1.0 - a) * std::pow(phi[f], a - 2.0) * grad_sq);
    }
    return s;
}

double distance_power_integral(const Grid& grid, double p)
{
    const auto q = grid.weights(BoundaryKind::Dirichlet);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto [x, y] = grid.node(BoundaryKind::Dirichlet, i);
        s += q[i] * std::pow(boundary_distance(grid.domain(), x, y), p);
    }
    return s;
}

std::vector<Field> probe_basis(const GridPtr& grid, std::size_t eigen, std::size_t random, std::uint64_t seed)
{
    std::vector<Field> basis;
    for (const auto& [k, l] : lowest_modes(*grid, eigen)) basis.push_back(sine_mode(grid, k, l));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t r = 0; r < random; ++r) {
        Field f(grid, BoundaryKind::Dirichlet);
        for (auto& z : f.values) {
            const double re = dist(rng);
            const double im = dist(rng);
            z = {re, im};
        }
        basis.push_back(std::move(f));
    }
    return basis;
}

double weighted_residual_on_basis(const Field& u, const Problem& problem, const WeightConfig& w,
                                  const std::vector<Field>& basis)
{
    double worst = 0.0;
    for (const auto& v : basis) {
        const double nv = std::sqrt(weighted_norm(v, w));
        if (nv > 0.0) worst = std::max(worst, std::abs(weighted_weak_residual(u, problem, w, v)) / nv);
    }
    return worst;
}

struct WeightedShiftedInverse::Impl {
    Eigen::SparseMatrix<double> K;
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd mass;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

WeightedShiftedInverse::WeightedShiftedInverse(const WeightConfig& w, double shift)
    : impl_(std::make_unique<Impl>())
{
    if (!w.grid) throw std::invalid_argument("weight has no grid");
    if (!(shift >= 0.0)) throw SolveError("shift must be nonnegative");
    const Grid& g = *w.grid;
    const EdgeGeometry G(g);
    n_ = g.node_count(BoundaryKind::Dirichlet);
    const auto q = g.weights(BoundaryKind::Dirichlet);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(8 * n_);
    // Row r collects the coefficient of conj(v_r) in B(u, v).
    for_each_edge(G, [&](int axis, std::size_t id, long ia, long ib, std::size_t fa, std::size_t fb, double h,
                         double t) {
        const double wbar = 0.5 * (w.nodal[fa] + w.nodal[fb]);
        const double diff = t * wbar / h;                        // times (u_b - u_a)
        const double adv = 0.5 * t * w.grad_weight[axis][id];    // times (u_b - u_a)
        auto add_row = [&](long row, double coeff) {
            if (row == kBoundary) return;
            if (ib != kBoundary) trip.emplace_back(static_cast<int>(row), static_cast<int>(ib), coeff);
            if (ia != kBoundary) trip.emplace_back(static_cast<int>(row), static_cast<int>(ia), -coeff);
        };
        add_row(ib, diff + adv);
        add_row(ia, -diff + adv);
    });
    const auto N = static_cast<Eigen::Index>(n_);
    impl_->K.resize(N, N);
    impl_->K.setFromTriplets(trip.begin(), trip.end());
    impl_->mass.resize(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
        impl_->mass[static_cast<Eigen::Index>(i)] = q[i] * w.weight_field[i];
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), shift * q[i] * w.weight_field[i]);
    }
    impl_->S.resize(N, N);
    impl_->S.setFromTriplets(trip.begin(), trip.end());
    impl_->S.makeCompressed();
    impl_->lu.compute(impl_->S);
    if (impl_->lu.info() != Eigen::Success) throw SolveError("sparse LU of the weighted operator failed");
    bound_ = 1.0 / (dirichlet_lambda1(g) + shift);
}

WeightedShiftedInverse::~WeightedShiftedInverse() = default;

const Eigen::SparseMatrix<double>& WeightedShiftedInverse::stiffness() const { return impl_->K; }

const Eigen::VectorXd& WeightedShiftedInverse::mass() const { return impl_->mass; }

void WeightedShiftedInverse::solve(std::span<const cplx> rhs, std::span<cplx> out) const
{
    if (rhs.size() != n_ || out.size() != n_) throw SolveError("size mismatch in weighted solve");
    const auto N = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd b(N, 2);
    for (Eigen::Index i = 0; i < N; ++i) {
        b(i, 0) = impl_->mass[i] * rhs[static_cast<std::size_t>(i)].real();
        b(i, 1) = impl_->mass[i] * rhs[static_cast<std::size_t>(i)].imag();
    }
    const Eigen::MatrixXd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw SolveError("weighted LU solve failed");
    for (Eigen::Index i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] = cplx(x(i, 0), x(i, 1));
}

bool singular_source_admissible(double alpha, double beta) { return beta < 0.5 * (alpha + 1.0); }

SolveResult solve_weighted(const Problem& problem, const WeightConfig& w, const SolverConfig& config)
{
    problem.validate();
    if (problem.bc != BoundaryKind::Dirichlet) throw std::invalid_argument("weighted solve is Dirichlet only");
    if (problem.grid != w.grid) throw std::invalid_argument("weight and problem grids differ");
    config.validate();
    const double delta = config.delta_shift ? *config.delta_shift : select_delta_shift(problem).delta;
    auto inverse = std::make_shared<WeightedShiftedInverse>(w, delta);
    return solve_with(problem, config, delta, std::move(inverse));
}

}  // namespace snls
