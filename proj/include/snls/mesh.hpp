#pragma once

// Uniform tensor grids on an interval or a rectangle, complex grid fields, the
// second-order discrete Laplacian with Dirichlet or Neumann handling, and the
// quadrature norms built on it.
//
// Layout. Axis k has n_k interior nodes and spacing h_k = extent/(n_k + 1).
// Dirichlet fields live on interior nodes only (the boundary trace is zero);
// Neumann fields also carry the boundary nodes, n_k + 2 points per axis. Node
// (i, j) is stored at j * points_x + i.
//
// Quadrature. Interior nodes weigh h_x h_y; Neumann boundary nodes use the
// trapezoid halves. With these weights -Δ_h is self-adjoint and
// <-Δ_h u, u> equals the edge-sum gradient norm exactly (summation by parts).

#include "snls/coefficients.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace snls {

enum class DomainKind { Interval, Rectangle };
enum class BoundaryKind { Dirichlet, Neumann };

std::string_view to_string(BoundaryKind bc);

struct Domain {
    DomainKind kind = DomainKind::Interval;
    std::vector<std::pair<double, double>> bounds;

    static Domain interval(double lo, double hi);
    static Domain rectangle(double xlo, double xhi, double ylo, double yhi);

    int dim() const { return kind == DomainKind::Interval ? 1 : 2; }
    double measure() const;
    void validate() const;
};

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 0;
    double h = 0.0;
};

class Grid {
public:
    // n holds interior points per axis (one entry per dimension, each >= 3).
    Grid(Domain domain, std::vector<std::size_t> n);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    const Axis& axis(int k) const { return axes_[k]; }
    double measure() const { return domain_.measure(); }
    double max_spacing() const;

    // Points along axis k for fields of the given kind; 1 for k >= dim().
    std::size_t points(BoundaryKind bc, int k) const;
    std::size_t node_count(BoundaryKind bc) const;
    double coord(BoundaryKind bc, int k, std::size_t i) const;
    std::array<double, 2> node(BoundaryKind bc, std::size_t idx) const;

    // Per-node quadrature weights in field layout.
    std::span<const double> weights(BoundaryKind bc) const;
    // One-dimensional weights along axis k (all 1 for k >= dim()).
    std::span<const double> line_weights(BoundaryKind bc, int k) const;
    // Trapezoid weights on the full node set, boundary included; sums to |Ω|.
    std::span<const double> quadrature_weights() const { return full_weights_; }

private:
    Domain domain_;
    std::array<Axis, 2> axes_{};
    std::array<std::vector<double>, 2> line_dir_;
    std::array<std::vector<double>, 2> line_neu_;
    std::vector<double> dir_weights_;
    std::vector<double> neu_weights_;
    std::vector<double> full_weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const Domain& domain, std::vector<std::size_t> n);

struct Field {
    GridPtr grid;
    BoundaryKind bc = BoundaryKind::Dirichlet;
    std::vector<cplx> values;

    Field() = default;
    Field(GridPtr g, BoundaryKind kind);

    std::size_t size() const { return values.size(); }
    double* raw() { return reinterpret_cast<double*>(values.data()); }
    const double* raw() const { return reinterpret_cast<const double*>(values.data()); }

    static Field from_function(GridPtr g, BoundaryKind kind,
                               const std::function<cplx(double, double)>& fn);
};

// -Δ_h with the chosen boundary handling. apply() runs on the SIMD kernels.
class DiscreteLaplacian {
public:
    DiscreteLaplacian(GridPtr grid, BoundaryKind bc);

    const Grid& grid() const { return *grid_; }
    BoundaryKind bc() const { return bc_; }
    std::size_t size() const { return grid_->node_count(bc_); }

    // out = (-Δ_h + shift) u
    void apply(std::span<const cplx> u, std::span<cplx> out, double shift = 0.0) const;

    // Matrix of -Δ_h + shift in field layout.
    Eigen::SparseMatrix<double> matrix(double shift = 0.0) const;
    // W (-Δ_h + shift) with W the quadrature weights; symmetric.
    Eigen::SparseMatrix<double> symmetric_form(double shift) const;

private:
    GridPtr grid_;
    BoundaryKind bc_;
};

// Quadrature inner product sum_i q_i u_i conj(v_i).
cplx inner(const Field& u, const Field& v);
double l2_norm(const Field& u);
// Edge-sum gradient norm consistent with the stencil.
double h1_seminorm(const Field& u);
double lp_norm(const Field& u, double p);
double linf_norm(const Field& u);

struct Norms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double lp = 0.0;
    double linf = 0.0;
};

Norms norms(const Field& u, double p);

struct PoincareEstimate {
    double C_P = 0.0;
    double lambda1 = 0.0;
    std::size_t iterations = 0;
    std::vector<double> eigenvector;  // Dirichlet layout, max-normalized, positive
};

// Smallest Dirichlet eigenvalue by inverse power iteration.
PoincareEstimate poincare_constant(const GridPtr& grid, double rel_tol = 1e-10,
                                   std::size_t max_iter = 10000);

// Distance to the box boundary at a point.
double boundary_distance(const Domain& domain, double x, double y);

// dist(x, Γ)^alpha on Dirichlet nodes; 0 < alpha < 1.
std::vector<double> boundary_distance_weight(const Grid& grid, double alpha);

// φ₁^alpha on Dirichlet nodes with φ₁ max-normalized.
std::vector<double> first_eigen_weight(const GridPtr& grid, double alpha);

}  // namespace snls
