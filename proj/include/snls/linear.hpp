#pragma once

// Solvers for the shifted operator (-Δ_h + δ) u = g on a grid field.

#include "snls/mesh.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <stdexcept>

namespace snls {

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearSolveOptions {
    // Direct sparse LDLT up to this many unknowns, preconditioned CG above.
    std::size_t direct_limit = 100000;
    double krylov_tol = 1e-13;
    std::size_t krylov_max_iter = 50000;
};

// u = (K + δ M)^{-1} M g for some assembled pair (K, M).
class ShiftedInverse {
public:
    virtual ~ShiftedInverse() = default;
    virtual void solve(std::span<const cplx> rhs, std::span<cplx> out) const = 0;
    // Bound on the L² -> L² norm of the inverse (1/(λ₁+δ) or 1/δ).
    virtual double inverse_bound() const = 0;
    virtual std::size_t size() const = 0;
    // The pair (K, M), M diagonal, with K symmetric in the Laplacian case.
    virtual const Eigen::SparseMatrix<double>& stiffness() const = 0;
    virtual const Eigen::VectorXd& mass() const = 0;
};

class ShiftedLaplacianSolver final : public ShiftedInverse {
public:
    // lambda1 is the smallest eigenvalue of -Δ_h (0 for Neumann); it only feeds
    // inverse_bound(). Throws SolveError if the operator is singular.
    ShiftedLaplacianSolver(GridPtr grid, BoundaryKind bc, double shift, double lambda1,
                           LinearSolveOptions options = {});
    ~ShiftedLaplacianSolver() override;

    void solve(std::span<const cplx> rhs, std::span<cplx> out) const override;
    double inverse_bound() const override { return bound_; }
    std::size_t size() const override { return n_; }
    const Eigen::SparseMatrix<double>& stiffness() const override;
    const Eigen::VectorXd& mass() const override;
    bool uses_direct() const { return direct_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    GridPtr grid_;
    BoundaryKind bc_;
    std::size_t n_ = 0;
    double bound_ = 0.0;
    bool direct_ = true;
};

// u = (K + M diag(D))^{-1} M g for a complex nodal shift D. Every D_i must
// keep the matrix invertible, e.g. D_i = δ + a s_i with s_i > 0 and a off
// the closed negative real ray. The sparsity pattern is analysed once and
// reused by update().
class NodalShiftSolver {
public:
    NodalShiftSolver(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& M);
    ~NodalShiftSolver();
    void update(std::span<const cplx> D);
    void solve(std::span<const cplx> rhs, std::span<cplx> out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace snls
