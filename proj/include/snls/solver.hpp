#pragma once

// Shifted fixed-point solver for the truncated problem
//
//     -Δ_h u + δu + f_ℓ(u) = F,
//
// iterated as u <- (1-θ)u + θ T_ℓ(u) with T_ℓ(u) = (-Δ_h + δ)^{-1}(F - f_ℓ(u)).
// ℓ grows until no node reaches it, at which point f_ℓ(u) = f(u) - δu and the
// iterate solves the untruncated discrete equation.

#include "snls/linear.hpp"
#include "snls/mesh.hpp"
#include "snls/nonlinearity.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace snls {

struct Problem {
    GridPtr grid;
    BoundaryKind bc = BoundaryKind::Dirichlet;
    CoefficientTriple coeffs;
    std::vector<double> V;  // field layout; empty means V = 0
    Field F;

    void validate() const;
    double potential(std::size_t i) const { return V.empty() ? 0.0 : V[i]; }
};

struct SolverConfig {
    // Unset: chosen by select_delta_shift.
    std::optional<double> delta_shift;
    double damping = 0.5;
    double min_damping = 1.0 / 1024.0;
    double tol_update = 1e-12;
    double tol_residual = 1e-8;
    std::size_t max_iter = 20000;
    // ell_initial <= 0 selects max(1, 2α‖F‖ / min(1, δ or λ₁)).
    double ell_initial = 0.0;
    double ell_growth = 2.0;
    // ℓ is raised once the relative update falls below this while truncation is active.
    double ell_stall_tol = 1e-3;
    // Start from a seeded random field instead of zero.
    bool random_initial = false;
    double initial_scale = 1.0;
    std::uint64_t seed = 0;
    bool record_history = true;
    // When Picard stalls (damping pinned at min_damping, or no residual
    // progress over stall_window iterations) continue with the nodal-shift
    // map u -> (-Δ_h + D(u))^{-1}(F - f(u) + D(u)u), D_i = δ + a|u_i|^{m-1},
    // which has the same fixed points and resolves zeros of u.
    bool nodal_shift_fallback = true;
    std::size_t stall_window = 500;
    LinearSolveOptions linear;

    void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, BlowUp };

std::string_view to_string(SolveStatus s);

struct IterationRecord {
    std::size_t iteration = 0;
    double update = 0.0;             // ‖u_new - u‖ / max(‖u_new‖, tiny)
    double truncated_residual = 0.0; // ‖(-Δ_h + δ)u + f_ℓ(u) - F‖
    double ell = 0.0;
    double damping = 0.0;
    double max_abs = 0.0;
    bool truncation_active = false;
    bool in_ball = true;             // ‖T_ℓ(u)‖ <= ρ
    bool nodal_shift = false;        // produced by the fallback map
};

struct SolveResult {
    Field u;
    double residual = 0.0;  // ‖-Δ_h u + f(u) - F‖, untruncated
    std::size_t iterations = 0;
    double final_ell = 0.0;
    double delta_shift = 0.0;
    double update = 0.0;
    bool truncation_active = false;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    bool schauder_ball_ok = true;
    double max_symmetry_defect = 0.0;
    std::size_t nodal_shift_iterations = 0;
    std::vector<IterationRecord> diagnostics;
};

struct DeltaChoice {
    double delta = 0.0;
    std::string reason;
};

// 1 under the potential-case existence hypotheses, δ★ under condition (ab)
// with c = 0, 0 for Dirichlet otherwise, 1 for Neumann otherwise.
DeltaChoice select_delta_shift(const Problem& problem);

// Smallest eigenvalue of the discrete Dirichlet Laplacian on a box, closed form.
double dirichlet_lambda1(const Grid& grid);

// L² → L² bound α of (-Δ_h + δ)^{-1}.
double shifted_inverse_bound(const Problem& problem, double delta);

// -Δ_h u + f(u) - F node by node.
Field discrete_residual(const Problem& problem, const Field& u);

// T_ℓ(u). Builds a fresh factorization; use FixedPointMap for repeated calls.
Field fixed_point_map(const Problem& problem, double delta, double ell, const Field& u,
                      const LinearSolveOptions& options = {});

class FixedPointMap {
public:
    FixedPointMap(const Problem& problem, double delta, const LinearSolveOptions& options = {});
    // Weighted variant: any inverse of the form (K + δM)^{-1} M.
    FixedPointMap(const Problem& problem, double delta, std::shared_ptr<const ShiftedInverse> inverse);

    void apply(double ell, const Field& u, Field& out) const;
    double inverse_bound() const { return inverse_->inverse_bound(); }
    double delta() const { return params_.delta_shift; }
    const ShiftedInverse& inverse() const { return *inverse_; }
    const NonlinearityParams& params() const { return params_; }

private:
    const Problem* problem_;
    NonlinearityParams params_;
    std::shared_ptr<const ShiftedInverse> inverse_;
    mutable Field scratch_;
};

Field initial_guess(const Problem& problem, const SolverConfig& config);

SolveResult solve(const Problem& problem, const SolverConfig& config);

// Same loop with an externally supplied shifted inverse and optional
// projection applied to every iterate.
SolveResult solve_with(const Problem& problem, const SolverConfig& config, double delta,
                       std::shared_ptr<const ShiftedInverse> inverse,
                       const std::function<void(Field&)>& project = {});

enum class Symmetry { Even1D, Odd1D, MirrorX, MirrorY };

std::string_view to_string(Symmetry s);

// Maximum of |u(x) ∓ u(Rx)| over the nodes, R the reflection of the symmetry.
double symmetry_defect(const Field& u, Symmetry s);
void project_symmetric(Field& u, Symmetry s);

// Throws std::invalid_argument when the domain or the data lack the symmetry.
SolveResult solve_symmetric(const Problem& problem, const SolverConfig& config, Symmetry s);

struct UniquenessProbe {
    double max_pairwise_l2_distance = 0.0;
    std::size_t trials = 0;
    std::size_t converged = 0;
    std::vector<std::string> errors;
    std::vector<SolveResult> results;
};

// Runs `trials` solves from seeded random starts concurrently; trial k uses
// seed config.seed + k.
UniquenessProbe uniqueness_probe(const Problem& problem, const SolverConfig& config,
                                 std::size_t trials);

}  // namespace snls
