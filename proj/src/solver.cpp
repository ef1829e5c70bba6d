#include "snls/solver.hpp"

#include "snls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace snls {

namespace {

constexpr double kTiny = 1e-300;

double diff_norm(const Field& u, const Field& v)
{
    return std::sqrt(kernels::active().weighted_diff_sq_norm(u.size(), u.grid->weights(u.bc).data(),
                                                             u.raw(), v.raw()));
}

double weight_sum(const Problem& p)
{
    double s = 0.0;
    for (double w : p.grid->weights(p.bc)) s += w;
    return s;
}

NonlinearityParams make_params(const Problem& p, double delta)
{
    NonlinearityParams np{p.coeffs, p.V, delta};
    np.validate();
    return np;
}

}  // namespace

void Problem::validate() const
{
    if (!grid) throw std::invalid_argument("problem needs a grid");
    coeffs.validate();
    if (F.grid != grid || F.bc != bc || F.size() != grid->node_count(bc))
        throw std::invalid_argument("source field does not match the problem grid");
    if (!V.empty() && V.size() != F.size())
        throw std::invalid_argument("potential size does not match the grid");
    for (const auto& z : F.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("source field must be finite");
    for (double v : V)
        if (!std::isfinite(v)) throw std::invalid_argument("potential must be finite");
}

void SolverConfig::validate() const
{
    if (delta_shift && (!std::isfinite(*delta_shift) || *delta_shift < 0.0))
        throw std::invalid_argument("delta_shift must be finite and >= 0");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (!(min_damping > 0.0 && min_damping <= damping))
        throw std::invalid_argument("min_damping must lie in (0, damping]");
    if (!(tol_update > 0.0) || !(tol_residual > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
    if (!(ell_growth > 1.0)) throw std::invalid_argument("ell_growth must exceed 1");
    if (!std::isfinite(ell_initial)) throw std::invalid_argument("ell_initial must be finite");
    if (!(ell_stall_tol > 0.0)) throw std::invalid_argument("ell_stall_tol must be positive");
    if (!(initial_scale >= 0.0) || !std::isfinite(initial_scale))
        throw std::invalid_argument("initial_scale must be finite and >= 0");
    if (stall_window == 0) throw std::invalid_argument("stall_window must be positive");
}

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::BlowUp: return "blow_up";
    }
    return "unknown";
}

std::string_view to_string(Symmetry s)
{
    switch (s) {
    case Symmetry::Even1D: return "even";
    case Symmetry::Odd1D: return "odd";
    case Symmetry::MirrorX: return "mirror_x";
    case Symmetry::MirrorY: return "mirror_y";
    }
    return "unknown";
}

DeltaChoice select_delta_shift(const Problem& problem)
{
    if (check_existence_thm2(problem.coeffs).satisfied)
        return {1.0, "potential-case existence hypotheses hold: delta = 1"};
    if (check_existence_thm3(problem.coeffs).satisfied) {
        const auto k = compute_lemAB_constants(problem.coeffs.a, problem.coeffs.b);
        return {k.delta_star, "condition (ab) holds with c = 0: delta = delta_star"};
    }
    if (problem.bc == BoundaryKind::Dirichlet) return {0.0, "Dirichlet default: delta = 0"};
    return {1.0, "Neumann default: delta = 1"};
}

double dirichlet_lambda1(const Grid& grid)
{
    double lambda = 0.0;
    for (int k = 0; k < grid.dim(); ++k) {
        const auto& ax = grid.axis(k);
        const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(ax.n + 1)));
        lambda += 4.0 / (ax.h * ax.h) * s * s;
    }
    return lambda;
}

double shifted_inverse_bound(const Problem& problem, double delta)
{
    if (problem.bc == BoundaryKind::Dirichlet) return 1.0 / (dirichlet_lambda1(*problem.grid) + delta);
    if (!(delta > 0.0)) throw SolveError("Neumann operator needs a positive shift");
    return 1.0 / delta;
}

Field discrete_residual(const Problem& problem, const Field& u)
{
    const DiscreteLaplacian lap(problem.grid, problem.bc);
    Field r(problem.grid, problem.bc);
    lap.apply(u.values, r.values);
    for (std::size_t i = 0; i < r.size(); ++i)
        r.values[i] += eval_f(problem.coeffs, u.values[i], problem.potential(i)) - problem.F.values[i];
    return r;
}

FixedPointMap::FixedPointMap(const Problem& problem, double delta, const LinearSolveOptions& options)
    : problem_(&problem), params_(make_params(problem, delta))
{
    const double lambda1 = problem.bc == BoundaryKind::Dirichlet ? dirichlet_lambda1(*problem.grid) : 0.0;
    inverse_ = std::make_shared<ShiftedLaplacianSolver>(problem.grid, problem.bc, delta, lambda1, options);
    scratch_ = Field(problem.grid, problem.bc);
}

FixedPointMap::FixedPointMap(const Problem& problem, double delta,
                             std::shared_ptr<const ShiftedInverse> inverse)
    : problem_(&problem), params_(make_params(problem, delta)), inverse_(std::move(inverse))
{
    if (!inverse_ || inverse_->size() != problem.F.size())
        throw std::invalid_argument("shifted inverse does not match the problem");
    scratch_ = Field(problem.grid, problem.bc);
}

void FixedPointMap::apply(double ell, const Field& u, Field& out) const
{
    if (out.size() != u.size()) out = Field(u.grid, u.bc);
    for (std::size_t i = 0; i < u.size(); ++i)
        scratch_.values[i] =
            problem_->F.values[i] - eval_f_trunc(params_, ell, u.values[i], params_.potential(i));
    inverse_->solve(scratch_.values, out.values);
}

Field fixed_point_map(const Problem& problem, double delta, double ell, const Field& u,
                      const LinearSolveOptions& options)
{
    problem.validate();
    const FixedPointMap T(problem, delta, options);
    Field out(problem.grid, problem.bc);
    T.apply(ell, u, out);
    return out;
}

Field initial_guess(const Problem& problem, const SolverConfig& config)
{
    Field u(problem.grid, problem.bc);
    if (!config.random_initial) return u;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& z : u.values) {
        const double re = dist(rng);
        const double im = dist(rng);
        z = config.initial_scale * cplx{re, im};
    }
    return u;
}

namespace {

// Continues from u with the nodal-shift map until convergence or the
// iteration budget runs out. Damping restarts at 1 and halves whenever the
// untruncated residual would grow.
void nodal_shift_stage(const Problem& problem, const SolverConfig& config, const FixedPointMap& T,
                       const std::function<void(Field&)>& project, SolveResult& res, Field& u)
{
    const auto& inv = T.inverse();
    NodalShiftSolver solver(inv.stiffness(), inv.mass());
    const auto& k = kernels::active();
    const double delta = T.delta();
    const cplx a = problem.coeffs.a;
    const double m = problem.coeffs.m;
    const std::size_t n = u.size();

    std::vector<cplx> D(n);
    Field rhs(problem.grid, problem.bc), P(problem.grid, problem.bc), next(problem.grid, problem.bc);
    double theta = 1.0;
    double current = l2_norm(discrete_residual(problem, u));
    res.status = SolveStatus::MaxIterations;

    while (res.iterations < config.max_iter) {
        const std::size_t it = ++res.iterations;
        const double floor = std::max(1e-12 * k.max_abs(n, u.raw()), 1e-200);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::pow(std::max(std::abs(u.values[i]), floor), m - 1.0);
            D[i] = delta + a * s;
            const double v = problem.potential(i);
            rhs.values[i] = problem.F.values[i] - eval_f(problem.coeffs, u.values[i], v) + D[i] * u.values[i];
        }
        solver.update(D);
        solver.solve(rhs.values, P.values);
        if (project) project(P);

        next.values = u.values;
        k.axpby(2 * n, theta, P.raw(), 1.0 - theta, next.raw());
        if (project) project(next);
        const double r = l2_norm(discrete_residual(problem, next));

        IterationRecord rec;
        rec.iteration = it;
        rec.ell = res.final_ell;
        rec.damping = theta;
        rec.truncated_residual = r;
        rec.nodal_shift = true;
        ++res.nodal_shift_iterations;

        const double nn = l2_norm(next);
        rec.update = diff_norm(next, u) / std::max(nn, kTiny);
        if (!std::isfinite(r) || !std::isfinite(nn) || (r > current && theta > config.min_damping)) {
            // rejected: keep u and retry with half the step
            theta = std::max(config.min_damping, 0.5 * theta);
            rec.max_abs = k.max_abs(n, u.raw());
            if (config.record_history) res.diagnostics.push_back(rec);
            continue;
        }
        std::swap(u.values, next.values);
        current = r;
        theta = std::min(1.0, 2.0 * theta);
        rec.max_abs = k.max_abs(n, u.raw());
        res.update = rec.update;
        if (config.record_history) res.diagnostics.push_back(rec);
        if ((rec.update <= config.tol_update || nn == 0.0) && r <= config.tol_residual) {
            res.status = SolveStatus::Converged;
            return;
        }
    }
}

}  // namespace

SolveResult solve_with(const Problem& problem, const SolverConfig& config, double delta,
                       std::shared_ptr<const ShiftedInverse> inverse,
                       const std::function<void(Field&)>& project)
{
    problem.validate();
    config.validate();
    const FixedPointMap T(problem, delta, std::move(inverse));
    const auto& params = T.params();
    const DiscreteLaplacian lap(problem.grid, problem.bc);
    const auto& k = kernels::active();

    const double alpha = T.inverse_bound();
    const double normF = l2_norm(problem.F);
    const double sqrt_measure = std::sqrt(weight_sum(problem));
    double ell = config.ell_initial;
    if (ell <= 0.0) {
        const double floor_eig = delta > 0.0 ? delta : 1.0 / alpha;
        ell = std::max(1.0, 2.0 * alpha * normF / std::min(1.0, floor_eig));
    }

    SolveResult res;
    res.delta_shift = delta;
    Field u = initial_guess(problem, config);
    if (project) project(u);
    const double reference = std::max(l2_norm(u), alpha * normF);

    Field Tu(problem.grid, problem.bc);
    Field Lu(problem.grid, problem.bc);
    Field next(problem.grid, problem.bc);
    Field best = u;
    double best_residual = std::numeric_limits<double>::infinity();

    double theta = config.damping;
    double prev_trunc_res = std::numeric_limits<double>::infinity();
    bool ell_changed = true;
    std::size_t calm_steps = 0;
    std::size_t floor_steps = 0;
    std::size_t last_progress = 0;
    double progress_mark = std::numeric_limits<double>::infinity();
    bool stalled = false;

    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        rec.ell = ell;

        // residuals of the current iterate
        lap.apply(u.values, Lu.values);
        double trunc_sq = 0.0, true_sq = 0.0;
        const auto w = problem.grid->weights(problem.bc);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double v = problem.potential(i);
            const cplx base = Lu.values[i] - problem.F.values[i];
            const cplx rt = base + delta * u.values[i] + eval_f_trunc(params, ell, u.values[i], v);
            const cplx rf = base + eval_f(problem.coeffs, u.values[i], v);
            trunc_sq += w[i] * std::norm(rt);
            true_sq += w[i] * std::norm(rf);
        }
        const double trunc_res = std::sqrt(trunc_sq);
        const double true_res = std::sqrt(true_sq);
        rec.truncated_residual = trunc_res;
        if (k.max_abs(u.size(), u.raw()) < ell && true_res < best_residual) {
            best_residual = true_res;
            best = u;
        }
        if (best_residual < 0.5 * progress_mark) {
            progress_mark = best_residual;
            last_progress = it;
        }

        if (!ell_changed && trunc_res > prev_trunc_res) {
            theta = std::max(config.min_damping, 0.5 * theta);
            calm_steps = 0;
        } else if (++calm_steps >= 20 && theta < config.damping) {
            theta = std::min(config.damping, 2.0 * theta);
            calm_steps = 0;
        }
        prev_trunc_res = trunc_res;
        ell_changed = false;
        rec.damping = theta;
        floor_steps = theta <= config.min_damping ? floor_steps + 1 : 0;

        T.apply(ell, u, Tu);
        if (project) project(Tu);
        const double rho = alpha * (normF + truncation_bound(params, ell) * sqrt_measure);
        rec.in_ball = l2_norm(Tu) <= rho * (1.0 + 1e-10) + kTiny;
        res.schauder_ball_ok = res.schauder_ball_ok && rec.in_ball;

        next.values = u.values;
        k.axpby(2 * u.size(), theta, Tu.raw(), 1.0 - theta, next.raw());
        if (project) project(next);

        const double nn = l2_norm(next);
        rec.update = diff_norm(next, u) / std::max(nn, kTiny);
        std::swap(u.values, next.values);
        rec.max_abs = k.max_abs(u.size(), u.raw());
        rec.truncation_active = rec.max_abs >= ell;

        res.iterations = it;
        res.update = rec.update;
        if (config.record_history) res.diagnostics.push_back(rec);

        if (!std::isfinite(nn) || (reference > 0.0 && nn > 1e6 * reference)) {
            res.status = SolveStatus::BlowUp;
            break;
        }

        if (rec.truncation_active) {
            if (rec.update < config.ell_stall_tol) {
                ell *= config.ell_growth;
                ell_changed = true;
            }
            continue;
        }
        if (rec.update <= config.tol_update) {
            const double r = l2_norm(discrete_residual(problem, u));
            if (r < best_residual) {
                best_residual = r;
                best = u;
            }
            if (r <= config.tol_residual) {
                res.status = SolveStatus::Converged;
                break;
            }
        }
        if (config.nodal_shift_fallback && (floor_steps >= 50 || it - last_progress >= config.stall_window)) {
            stalled = true;
            break;
        }
    }

    if (res.status == SolveStatus::Converged || !std::isfinite(best_residual)) best = u;

    const bool fallback = config.nodal_shift_fallback && res.status != SolveStatus::Converged &&
                          res.iterations < config.max_iter && in_admissible_set(problem.coeffs.a) &&
                          (stalled || res.status == SolveStatus::BlowUp);
    if (fallback) {
        u = best;
        res.final_ell = ell;
        nodal_shift_stage(problem, config, T, project, res, u);
        best = u;
        while (k.max_abs(u.size(), u.raw()) >= ell) ell *= config.ell_growth;
    }
    res.u = std::move(best);
    res.final_ell = ell;
    res.residual = l2_norm(discrete_residual(problem, res.u));
    res.truncation_active = k.max_abs(res.u.size(), res.u.raw()) >= ell;
    res.converged = res.status == SolveStatus::Converged;
    return res;
}

SolveResult solve(const Problem& problem, const SolverConfig& config)
{
    problem.validate();
    config.validate();
    const double delta = config.delta_shift ? *config.delta_shift : select_delta_shift(problem).delta;
    const double lambda1 = problem.bc == BoundaryKind::Dirichlet ? dirichlet_lambda1(*problem.grid) : 0.0;
    auto inverse =
        std::make_shared<ShiftedLaplacianSolver>(problem.grid, problem.bc, delta, lambda1, config.linear);
    return solve_with(problem, config, delta, std::move(inverse));
}

namespace {

// Index of the reflected node; sign is -1 for odd symmetry.
struct Reflection {
    std::size_t px = 1, py = 1;
    bool flip_x = false, flip_y = false;
    double sign = 1.0;

    std::size_t operator()(std::size_t idx) const
    {
        std::size_t i = idx % px, j = idx / px;
        if (flip_x) i = px - 1 - i;
        if (flip_y) j = py - 1 - j;
        return j * px + i;
    }
};

Reflection reflection_for(const Grid& g, BoundaryKind bc, Symmetry s)
{
    Reflection r{g.points(bc, 0), g.points(bc, 1)};
    switch (s) {
    case Symmetry::Even1D:
    case Symmetry::Odd1D:
        if (g.dim() != 1) throw std::invalid_argument("even/odd symmetry needs an interval");
        r.flip_x = true;
        r.sign = s == Symmetry::Odd1D ? -1.0 : 1.0;
        break;
    case Symmetry::MirrorX: r.flip_x = true; break;
    case Symmetry::MirrorY:
        if (g.dim() != 2) throw std::invalid_argument("mirror_y symmetry needs a rectangle");
        r.flip_y = true;
        break;
    }
    return r;
}

}  // namespace

double symmetry_defect(const Field& u, Symmetry s)
{
    const auto R = reflection_for(*u.grid, u.bc, s);
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        d = std::max(d, std::abs(u.values[i] - R.sign * u.values[R(i)]));
    return d;
}

void project_symmetric(Field& u, Symmetry s)
{
    const auto R = reflection_for(*u.grid, u.bc, s);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const std::size_t j = R(i);
        if (j < i) continue;
        if (j == i) {
            if (R.sign < 0.0) u.values[i] = 0.0;
            continue;
        }
        const cplx avg = 0.5 * (u.values[i] + R.sign * u.values[j]);
        u.values[i] = avg;
        u.values[j] = R.sign * avg;
    }
}

SolveResult solve_symmetric(const Problem& problem, const SolverConfig& config, Symmetry s)
{
    problem.validate();
    const Grid& g = *problem.grid;
    if (s == Symmetry::Even1D || s == Symmetry::Odd1D) {
        const auto [lo, hi] = g.domain().bounds[0];
        if (std::abs(lo + hi) > 1e-12 * (hi - lo))
            throw std::invalid_argument("even/odd symmetry needs an interval symmetric about 0");
    }
    const auto R = reflection_for(g, problem.bc, s);
    double fmax = 0.0;
    for (const auto& z : problem.F.values) fmax = std::max(fmax, std::abs(z));
    const double tol = 1e-12 * std::max(1.0, fmax);
    if (symmetry_defect(problem.F, s) > tol)
        throw std::invalid_argument("source does not have the declared " + std::string(to_string(s)) +
                                    " symmetry");
    for (std::size_t i = 0; i < problem.V.size(); ++i)
        if (std::abs(problem.V[i] - problem.V[R(i)]) > 1e-12 * std::max(1.0, std::abs(problem.V[i])))
            throw std::invalid_argument("potential is not invariant under the reflection");

    config.validate();
    const double delta = config.delta_shift ? *config.delta_shift : select_delta_shift(problem).delta;
    const double lambda1 = problem.bc == BoundaryKind::Dirichlet ? dirichlet_lambda1(g) : 0.0;
    auto inverse = std::make_shared<ShiftedLaplacianSolver>(problem.grid, problem.bc, delta, lambda1,
                                                            config.linear);
    double commute_defect = 0.0;
    auto project = [&](Field& f) {
        double fm = 0.0;
        for (const auto& z : f.values) fm = std::max(fm, std::abs(z));
        if (fm > 0.0) commute_defect = std::max(commute_defect, symmetry_defect(f, s) / fm);
        project_symmetric(f, s);
    };
    auto res = solve_with(problem, config, delta, std::move(inverse), project);
    res.max_symmetry_defect = commute_defect;
    return res;
}

UniquenessProbe uniqueness_probe(const Problem& problem, const SolverConfig& config, std::size_t trials)
{
    if (trials < 2) throw std::invalid_argument("uniqueness probe needs at least 2 trials");
    problem.validate();
    std::vector<std::future<SolveResult>> jobs;
    jobs.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        SolverConfig c = config;
        c.random_initial = true;
        c.seed = config.seed + t;
        jobs.push_back(std::async(std::launch::async, [&problem, c] { return solve(problem, c); }));
    }
    UniquenessProbe probe;
    probe.trials = trials;
    std::vector<const Field*> done;
    for (std::size_t t = 0; t < trials; ++t) {
        try {
            probe.results.push_back(jobs[t].get());
        } catch (const std::exception& e) {
            probe.errors.push_back("trial " + std::to_string(t) + ": " + e.what());
            continue;
        }
    }
    for (const auto& r : probe.results)
        if (r.converged) done.push_back(&r.u);
    probe.converged = done.size();
    if (done.size() < 2) {
        probe.max_pairwise_l2_distance = std::numeric_limits<double>::quiet_NaN();
        return probe;
    }
    for (std::size_t i = 0; i < done.size(); ++i)
        for (std::size_t j = i + 1; j < done.size(); ++j)
            probe.max_pairwise_l2_distance =
                std::max(probe.max_pairwise_l2_distance, diff_norm(*done[i], *done[j]));
    return probe;
}

}  // namespace snls
