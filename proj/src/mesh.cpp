#include "snls/mesh.hpp"

#include "snls/kernels.hpp"
#include "snls/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snls {

std::string_view to_string(BoundaryKind bc)
{
    return bc == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
}

Domain Domain::interval(double lo, double hi)
{
    Domain d{DomainKind::Interval, {{lo, hi}}};
    d.validate();
    return d;
}

Domain Domain::rectangle(double xlo, double xhi, double ylo, double yhi)
{
    Domain d{DomainKind::Rectangle, {{xlo, xhi}, {ylo, yhi}}};
    d.validate();
    return d;
}

double Domain::measure() const
{
    double m = 1.0;
    for (const auto& [lo, hi] : bounds) m *= hi - lo;
    return m;
}

void Domain::validate() const
{
    if (bounds.size() != static_cast<std::size_t>(dim()))
        throw std::invalid_argument("domain needs one (lo, hi) pair per axis");
    for (const auto& [lo, hi] : bounds) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw std::invalid_argument("domain bounds must be finite with lo < hi");
    }
}

Grid::Grid(Domain domain, std::vector<std::size_t> n) : domain_(std::move(domain))
{
    domain_.validate();
    if (n.size() != static_cast<std::size_t>(dim()))
        throw std::invalid_argument("grid needs one point count per axis");
    for (int k = 0; k < 2; ++k) {
        if (k < dim()) {
            if (n[k] < 3) throw std::invalid_argument("grid needs at least 3 interior points per axis");
            const auto [lo, hi] = domain_.bounds[k];
            axes_[k] = Axis{lo, hi, n[k], (hi - lo) / static_cast<double>(n[k] + 1)};
            line_dir_[k].assign(n[k], axes_[k].h);
            line_neu_[k].assign(n[k] + 2, axes_[k].h);
            line_neu_[k].front() = line_neu_[k].back() = 0.5 * axes_[k].h;
        } else {
            axes_[k] = Axis{0.0, 0.0, 1, 0.0};
            line_dir_[k].assign(1, 1.0);
            line_neu_[k].assign(1, 1.0);
        }
    }
    auto tensor = [](const std::vector<double>& wx, const std::vector<double>& wy) {
        std::vector<double> w;
        w.reserve(wx.size() * wy.size());
        for (double y : wy)
            for (double x : wx) w.push_back(x * y);
        return w;
    };
    dir_weights_ = tensor(line_dir_[0], line_dir_[1]);
    neu_weights_ = tensor(line_neu_[0], line_neu_[1]);
    full_weights_ = neu_weights_;
}

double Grid::max_spacing() const
{
    double h = axes_[0].h;
    if (dim() == 2) h = std::max(h, axes_[1].h);
    return h;
}

std::size_t Grid::points(BoundaryKind bc, int k) const
{
    if (k >= dim()) return 1;
    return bc == BoundaryKind::Dirichlet ? axes_[k].n : axes_[k].n + 2;
}

std::size_t Grid::node_count(BoundaryKind bc) const { return points(bc, 0) * points(bc, 1); }

double Grid::coord(BoundaryKind bc, int k, std::size_t i) const
{
    if (k >= dim()) return 0.0;
    const double offset = bc == BoundaryKind::Dirichlet ? 1.0 : 0.0;
    return axes_[k].lo + (static_cast<double>(i) + offset) * axes_[k].h;
}

std::array<double, 2> Grid::node(BoundaryKind bc, std::size_t idx) const
{
    const std::size_t px = points(bc, 0);
    return {coord(bc, 0, idx % px), coord(bc, 1, idx / px)};
}

std::span<const double> Grid::weights(BoundaryKind bc) const
{
    return bc == BoundaryKind::Dirichlet ? std::span<const double>(dir_weights_)
                                         : std::span<const double>(neu_weights_);
}

std::span<const double> Grid::line_weights(BoundaryKind bc, int k) const
{
    return bc == BoundaryKind::Dirichlet ? std::span<const double>(line_dir_[k])
                                         : std::span<const double>(line_neu_[k]);
}

GridPtr build_grid(const Domain& domain, std::vector<std::size_t> n)
{
    return std::make_shared<const Grid>(domain, std::move(n));
}

Field::Field(GridPtr g, BoundaryKind kind) : grid(std::move(g)), bc(kind)
{
    if (!grid) throw std::invalid_argument("field needs a grid");
    values.assign(grid->node_count(bc), cplx{0.0, 0.0});
}

Field Field::from_function(GridPtr g, BoundaryKind kind,
                           const std::function<cplx(double, double)>& fn)
{
    Field f(std::move(g), kind);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto [x, y] = f.grid->node(kind, i);
        f.values[i] = fn(x, y);
    }
    return f;
}

DiscreteLaplacian::DiscreteLaplacian(GridPtr grid, BoundaryKind bc) : grid_(std::move(grid)), bc_(bc)
{
    if (!grid_) throw std::invalid_argument("Laplacian needs a grid");
}

void DiscreteLaplacian::apply(std::span<const cplx> u, std::span<cplx> out, double shift) const
{
    if (u.size() != size() || out.size() != size())
        throw std::invalid_argument("Laplacian apply: size mismatch");
    const auto& k = kernels::active();
    const bool neumann = bc_ == BoundaryKind::Neumann;
    const std::size_t px = grid_->points(bc_, 0);
    const std::size_t py = grid_->points(bc_, 1);
    const double inv_hx2 = 1.0 / (grid_->axis(0).h * grid_->axis(0).h);
    const auto* in = reinterpret_cast<const double*>(u.data());
    auto* res = reinterpret_cast<double*>(out.data());

    for (std::size_t j = 0; j < py; ++j)
        k.line_stencil(in + 2 * j * px, px, inv_hx2, neumann, shift, res + 2 * j * px);
    if (grid_->dim() == 1) return;

    const double inv_hy2 = 1.0 / (grid_->axis(1).h * grid_->axis(1).h);
    const std::size_t row = 2 * px;
    for (std::size_t j = 0; j < py; ++j) {
        const double* cur = in + j * row;
        const double* prev = j > 0 ? cur - row : nullptr;
        const double* next = j + 1 < py ? cur + row : nullptr;
        double c_prev = -inv_hy2, c_next = -inv_hy2;
        if (neumann && j == 0) { prev = nullptr; c_next = -2.0 * inv_hy2; }
        if (neumann && j + 1 == py) { next = nullptr; c_prev = -2.0 * inv_hy2; }
        // prev/next may be null; the kernel skips those terms
        if (prev == nullptr && next != nullptr)
            k.add_combination(res + j * row, row, 2.0 * inv_hy2, cur, c_next, next, 0.0, nullptr);
        else
            k.add_combination(res + j * row, row, 2.0 * inv_hy2, cur, c_prev, prev, c_next, next);
    }
}

Eigen::SparseMatrix<double> DiscreteLaplacian::matrix(double shift) const
{
    const bool neumann = bc_ == BoundaryKind::Neumann;
    const std::size_t px = grid_->points(bc_, 0);
    const std::size_t py = grid_->points(bc_, 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size() * 5);

    auto add_axis = [&](std::size_t count, std::size_t stride, double inv_h2, auto index_of) {
        for (std::size_t line = 0; line < (stride == 1 ? py : px); ++line) {
            for (std::size_t i = 0; i < count; ++i) {
                const auto r = static_cast<int>(index_of(line, i));
                trip.emplace_back(r, r, 2.0 * inv_h2);
                const bool first = i == 0, last = i + 1 == count;
                if (!first) {
                    const double c = (neumann && last) ? -2.0 * inv_h2 : -inv_h2;
                    trip.emplace_back(r, static_cast<int>(index_of(line, i - 1)), c);
                }
                if (!last) {
                    const double c = (neumann && first) ? -2.0 * inv_h2 : -inv_h2;
                    trip.emplace_back(r, static_cast<int>(index_of(line, i + 1)), c);
                }
            }
        }
    };
    const double hx = grid_->axis(0).h;
    add_axis(px, 1, 1.0 / (hx * hx), [px](std::size_t j, std::size_t i) { return j * px + i; });
    if (grid_->dim() == 2) {
        const double hy = grid_->axis(1).h;
        add_axis(py, px, 1.0 / (hy * hy), [px](std::size_t i, std::size_t j) { return j * px + i; });
    }
    if (shift != 0.0)
        for (std::size_t i = 0; i < size(); ++i)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), shift);

    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::SparseMatrix<double> DiscreteLaplacian::symmetric_form(double shift) const
{
    const auto w = grid_->weights(bc_);
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    Eigen::SparseMatrix<double> S = wv.asDiagonal() * matrix(shift);
    // Clean rounding asymmetry so LDLT sees an exactly symmetric matrix.
    Eigen::SparseMatrix<double> St = S.transpose();
    return 0.5 * (S + St);
}

cplx inner(const Field& u, const Field& v)
{
    if (u.size() != v.size() || u.bc != v.bc) throw std::invalid_argument("inner: field mismatch");
    double out[2];
    kernels::active().weighted_inner(u.size(), u.grid->weights(u.bc).data(), u.raw(), v.raw(), out);
    return {out[0], out[1]};
}

double l2_norm(const Field& u)
{
    return std::sqrt(kernels::active().weighted_sq_norm(u.size(), u.grid->weights(u.bc).data(), u.raw()));
}

double h1_seminorm(const Field& u)
{
    const Grid& g = *u.grid;
    const bool dir = u.bc == BoundaryKind::Dirichlet;
    const std::size_t px = g.points(u.bc, 0);
    const std::size_t py = g.points(u.bc, 1);
    auto at = [&](std::size_t i, std::size_t j) { return u.values[j * px + i]; };
    double total = 0.0;

    // x-edges, weighted by the transverse line weight
    {
        const double hx = g.axis(0).h;
        const auto wy = g.line_weights(u.bc, 1);
        for (std::size_t j = 0; j < py; ++j) {
            double s = 0.0;
            if (dir) s += std::norm(at(0, j)) + std::norm(at(px - 1, j));
            for (std::size_t i = 0; i + 1 < px; ++i) s += std::norm(at(i + 1, j) - at(i, j));
            total += wy[j] / hx * s;
        }
    }
    if (g.dim() == 2) {
        const double hy = g.axis(1).h;
        const auto wx = g.line_weights(u.bc, 0);
        for (std::size_t i = 0; i < px; ++i) {
            double s = 0.0;
            if (dir) s += std::norm(at(i, 0)) + std::norm(at(i, py - 1));
            for (std::size_t j = 0; j + 1 < py; ++j) s += std::norm(at(i, j + 1) - at(i, j));
            total += wx[i] / hy * s;
        }
    }
    return std::sqrt(total);
}

double lp_norm(const Field& u, double p)
{
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
    const auto w = u.grid->weights(u.bc);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u.values[i]), p);
    return std::pow(s, 1.0 / p);
}

double linf_norm(const Field& u) { return kernels::active().max_abs(u.size(), u.raw()); }

Norms norms(const Field& u, double p)
{
    return {l2_norm(u), h1_seminorm(u), lp_norm(u, p), linf_norm(u)};
}

PoincareEstimate poincare_constant(const GridPtr& grid, double rel_tol, std::size_t max_iter)
{
    const ShiftedLaplacianSolver inv(grid, BoundaryKind::Dirichlet, 0.0, 0.0);
    const DiscreteLaplacian lap(grid, BoundaryKind::Dirichlet);
    Field v(grid, BoundaryKind::Dirichlet);
    std::fill(v.values.begin(), v.values.end(), cplx{1.0, 0.0});
    Field next(grid, BoundaryKind::Dirichlet);
    Field Av(grid, BoundaryKind::Dirichlet);

    double lambda = 0.0;
    PoincareEstimate est;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        inv.solve(v.values, next.values);
        const double nrm = l2_norm(next);
        for (auto& z : next.values) z /= nrm;
        double change = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            change = std::max(change, std::abs(next.values[i] - v.values[i]));
        std::swap(v.values, next.values);
        lap.apply(v.values, Av.values);
        const double rq = inner(Av, v).real();
        // the eigenvector converges at the square root of the Rayleigh quotient rate
        const bool done = it > 1 && std::abs(rq - lambda) <= rel_tol * std::abs(rq) &&
                          change <= rel_tol * linf_norm(v);
        lambda = rq;
        if (done) {
            est.iterations = it;
            est.lambda1 = lambda;
            est.C_P = 1.0 / std::sqrt(lambda);
            const double vmax = linf_norm(v);
            est.eigenvector.resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) est.eigenvector[i] = std::abs(v.values[i]) / vmax;
            return est;
        }
    }
    throw SolveError("inverse power iteration did not converge");
}

double boundary_distance(const Domain& domain, double x, double y)
{
    double d = std::min(x - domain.bounds[0].first, domain.bounds[0].second - x);
    if (domain.dim() == 2) d = std::min({d, y - domain.bounds[1].first, domain.bounds[1].second - y});
    return d;
}

std::vector<double> boundary_distance_weight(const Grid& grid, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    std::vector<double> w(grid.node_count(BoundaryKind::Dirichlet));
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto [x, y] = grid.node(BoundaryKind::Dirichlet, i);
        w[i] = std::pow(boundary_distance(grid.domain(), x, y), alpha);
    }
    return w;
}

std::vector<double> first_eigen_weight(const GridPtr& grid, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    auto phi = poincare_constant(grid).eigenvector;
    for (auto& p : phi) p = std::pow(p, alpha);
    return phi;
}

}  // namespace snls
