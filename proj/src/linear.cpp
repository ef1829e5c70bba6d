#include "snls/linear.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

namespace snls {

struct ShiftedLaplacianSolver::Impl {
    Eigen::SparseMatrix<double> K;
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd weights;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
};

ShiftedLaplacianSolver::ShiftedLaplacianSolver(GridPtr grid, BoundaryKind bc, double shift,
                                               double lambda1, LinearSolveOptions options)
    : impl_(std::make_unique<Impl>()), grid_(std::move(grid)), bc_(bc)
{
    if (!(shift >= 0.0)) throw SolveError("shift must be nonnegative");
    if (bc == BoundaryKind::Neumann && !(shift > 0.0))
        throw SolveError("Neumann operator needs a positive shift to be invertible");

    const DiscreteLaplacian lap(grid_, bc_);
    n_ = lap.size();
    impl_->K = lap.symmetric_form(0.0);
    impl_->S = lap.symmetric_form(shift);
    const auto w = grid_->weights(bc_);
    impl_->weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));

    const double floor_eig = bc == BoundaryKind::Dirichlet ? lambda1 : 0.0;
    bound_ = 1.0 / (floor_eig + shift);

    direct_ = n_ <= options.direct_limit;
    if (direct_) {
        impl_->ldlt.compute(impl_->S);
        if (impl_->ldlt.info() != Eigen::Success)
            throw SolveError("sparse LDLT factorization failed");
    } else {
        impl_->cg.setTolerance(options.krylov_tol);
        impl_->cg.setMaxIterations(static_cast<Eigen::Index>(options.krylov_max_iter));
        impl_->cg.compute(impl_->S);
        if (impl_->cg.info() != Eigen::Success) throw SolveError("CG setup failed");
    }
}

ShiftedLaplacianSolver::~ShiftedLaplacianSolver() = default;

void ShiftedLaplacianSolver::solve(std::span<const cplx> rhs, std::span<cplx> out) const
{
    if (rhs.size() != n_ || out.size() != n_) throw SolveError("size mismatch in linear solve");
    const auto N = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd b(N, 2);
    for (Eigen::Index i = 0; i < N; ++i) {
        b(i, 0) = impl_->weights[i] * rhs[static_cast<std::size_t>(i)].real();
        b(i, 1) = impl_->weights[i] * rhs[static_cast<std::size_t>(i)].imag();
    }
    Eigen::MatrixXd x;
    if (direct_) {
        x = impl_->ldlt.solve(b);
        if (impl_->ldlt.info() != Eigen::Success) throw SolveError("LDLT solve failed");
    } else {
        x.resize(N, 2);
        for (int c = 0; c < 2; ++c) {
            x.col(c) = impl_->cg.solve(b.col(c));
            if (impl_->cg.info() != Eigen::Success)
                throw SolveError("CG did not converge in the shifted solve");
        }
    }
    for (Eigen::Index i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] = cplx(x(i, 0), x(i, 1));
}

const Eigen::SparseMatrix<double>& ShiftedLaplacianSolver::stiffness() const { return impl_->K; }

const Eigen::VectorXd& ShiftedLaplacianSolver::mass() const { return impl_->weights; }

struct NodalShiftSolver::Impl {
    Eigen::SparseMatrix<cplx> A;
    Eigen::VectorXd M;
    std::vector<double> base_diag;
    std::vector<cplx*> diag;  // diagonal entries of A inside its storage
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    bool factored = false;
};

NodalShiftSolver::NodalShiftSolver(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& M)
    : impl_(std::make_unique<Impl>())
{
    if (K.rows() != K.cols() || K.rows() != M.size()) throw SolveError("nodal shift: size mismatch");
    const auto N = K.rows();
    // add an explicit diagonal so every diagonal entry is stored
    Eigen::SparseMatrix<double> I(N, N);
    I.setIdentity();
    Eigen::SparseMatrix<double> base = K + I;
    impl_->A = base.cast<cplx>();
    impl_->A.makeCompressed();
    impl_->M = M;
    impl_->diag.assign(static_cast<std::size_t>(N), nullptr);
    impl_->base_diag.assign(static_cast<std::size_t>(N), 0.0);
    for (Eigen::Index c = 0; c < impl_->A.outerSize(); ++c)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(impl_->A, c); it; ++it)
            if (it.row() == it.col()) {
                impl_->diag[static_cast<std::size_t>(c)] = &it.valueRef();
                impl_->base_diag[static_cast<std::size_t>(c)] = it.value().real() - 1.0;
            }
    impl_->lu.analyzePattern(impl_->A);
}

NodalShiftSolver::~NodalShiftSolver() = default;

void NodalShiftSolver::update(std::span<const cplx> D)
{
    const auto N = impl_->M.size();
    if (static_cast<Eigen::Index>(D.size()) != N) throw SolveError("nodal shift: size mismatch");
    for (std::size_t i = 0; i < D.size(); ++i)
        *impl_->diag[i] = impl_->base_diag[i] + impl_->M[static_cast<Eigen::Index>(i)] * D[i];
    impl_->lu.factorize(impl_->A);
    impl_->factored = impl_->lu.info() == Eigen::Success;
    if (!impl_->factored) throw SolveError("nodal shift: sparse LU factorization failed");
}

void NodalShiftSolver::solve(std::span<const cplx> rhs, std::span<cplx> out) const
{
    if (!impl_->factored) throw SolveError("nodal shift: update() must precede solve()");
    const auto N = impl_->M.size();
    if (static_cast<Eigen::Index>(rhs.size()) != N || static_cast<Eigen::Index>(out.size()) != N)
        throw SolveError("nodal shift: size mismatch");
    Eigen::VectorXcd b(N);
    for (Eigen::Index i = 0; i < N; ++i) b[i] = impl_->M[i] * rhs[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw SolveError("nodal shift: LU solve failed");
    for (Eigen::Index i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] = x[i];
}

}  // namespace snls
