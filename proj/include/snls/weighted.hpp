#pragma once

// Weighted mode: norms in L²(Ω; w) with w = δ^α (δ the distance to the
// boundary) or w = φ₁^α, the Hardy ratio, the weighted weak form with its
// transport term, and the weighted solve.
//
// Discrete weighted form. With Du the edge difference of u, w̄ and v̄ edge
// averages and Dw the edge difference of the nodal weight,
//
//     B(u, v) = Σ_edges |cell| ( w̄ Du conj(Dv) + Du conj(v̄) Dw ),
//
// which is the discrete product rule D(wv) = w̄ Dv + v̄ Dw applied to
// Σ Du conj(D(wv)). Dw is the exact edge mean of ∇w for either weight, so no
// pointwise gradient is needed at the medial-axis kink of δ.

#include "snls/solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace snls {

enum class WeightKind { BoundaryDistance, FirstEigenfunction, Constant };

std::string_view to_string(WeightKind k);

struct WeightConfig {
    double alpha = 0.5;
    WeightKind kind = WeightKind::BoundaryDistance;
    GridPtr grid;
    // w on interior (Dirichlet layout) nodes.
    std::vector<double> weight_field;
    // w on the full node set (n+2 points per axis), zero on Γ unless Constant.
    std::vector<double> nodal;
    // δ(x) on interior nodes.
    std::vector<double> distance;
    // Edge differences Dw along x and y, stored per edge (see edge_count).
    std::array<std::vector<double>, 2> grad_weight;
};

// 0 < alpha < 1 and a Dirichlet-capable grid.
WeightConfig make_weight(const GridPtr& grid, double alpha, WeightKind kind);

// w ≡ 1 including the boundary nodes, Dw = 0. Test hook.
WeightConfig constant_weight(const GridPtr& grid);

// ∫ |f|^exponent w over the interior nodes. exponent = 2 gives ‖f‖² in L²(Ω; w).
double weighted_norm(const Field& f, const WeightConfig& w, double exponent = 2.0);

// ∫ |v|² δ^{-(2-α)}, the left side of the Hardy inequality.
double hardy_lhs(const Field& v, const WeightConfig& w);

// Σ_edges |cell| w̄ |Dv|², the weighted Dirichlet energy.
double weighted_energy(const Field& v, const WeightConfig& w);

struct HardyReport {
    double best_constant_estimate = 0.0;
    std::string worst_field_id;
    std::vector<std::pair<std::string, double>> ratios;
};

// Max of hardy_lhs / weighted_energy over sine probes, boundary profiles
// Π((x-lo)(hi-x))^β with β = (1-α)/2 + {0.5, 1, 1.5}, and `samples` seeded
// random combinations of low sine modes.
HardyReport hardy_check(const WeightConfig& w, std::size_t samples, std::uint64_t seed);

// Re B(u, v) + Re Σ q w (f(u) - F) conj(v).
double weighted_weak_residual(const Field& u, const Problem& problem, const WeightConfig& w,
                              const Field& v);

// Re Σ |cell| Du conj(ū) Dw; equals ½ Σ |cell| D|u|² Dw.
double transport_term(const Field& u, const WeightConfig& w);

// (αλ₁/2)∫|u|²φ₁^α + (α(1-α)/2)∫|u|²φ₁^{α-2}|∇φ₁|² with centred differences
// for ∇φ₁; the continuum value of the transport term for w = φ₁^α.
double transport_identity_value(const Field& u, const WeightConfig& w);

// Σ q δ^p over interior nodes.
double distance_power_integral(const Grid& grid, double p);

// The `eigen` lowest discrete Dirichlet eigenvectors followed by `random`
// seeded random fields.
std::vector<Field> probe_basis(const GridPtr& grid, std::size_t eigen, std::size_t random,
                               std::uint64_t seed);

// max over the basis of |weighted_weak_residual(u, ·, v)| / ‖v‖_{L²(Ω; w)}.
double weighted_residual_on_basis(const Field& u, const Problem& problem, const WeightConfig& w,
                                  const std::vector<Field>& basis);

// (K_w + δ M_w)^{-1} M_w with K_w the matrix of B and M_w = diag(q w).
class WeightedShiftedInverse final : public ShiftedInverse {
public:
    WeightedShiftedInverse(const WeightConfig& w, double shift);
    ~WeightedShiftedInverse() override;

    void solve(std::span<const cplx> rhs, std::span<cplx> out) const override;
    double inverse_bound() const override { return bound_; }
    std::size_t size() const override { return n_; }
    const Eigen::SparseMatrix<double>& stiffness() const override;
    const Eigen::VectorXd& mass() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t n_ = 0;
    double bound_ = 0.0;
};

// Singular sources F ~ δ^{-β} lie in L²(Ω; δ^α) iff β < (α + 1)/2.
bool singular_source_admissible(double alpha, double beta);

SolveResult solve_weighted(const Problem& problem, const WeightConfig& w, const SolverConfig& config);

}  // namespace snls
