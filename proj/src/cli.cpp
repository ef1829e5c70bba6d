#include "snls/cli.hpp"

#include "snls/bounds.hpp"
#include "snls/config.hpp"
#include "snls/kernels.hpp"
#include "snls/weighted.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>

namespace snls {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNoTheorem = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInvalid = 3;

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string num(double v) { return fmt::format("{:.17g}", v); }

json report_json(const HypothesisReport& r)
{
    return {{"theorem_id", std::string(to_string(r.theorem_id))}, {"satisfied", r.satisfied}, {"witness", r.witness}};
}

json coefficients_json(const CoefficientTriple& t)
{
    return {{"a", format_complex(t.a)}, {"b", format_complex(t.b)}, {"c", format_complex(t.c)}, {"m", t.m}};
}

bool potential_vanishes(const Problem& p)
{
    if (p.coeffs.c == cplx{0.0, 0.0}) return true;
    return std::all_of(p.V.begin(), p.V.end(), [](double v) { return v == 0.0; });
}

std::vector<HypothesisReport> hypothesis_reports(const Problem& p, double C_P)
{
    std::vector<HypothesisReport> reps;
    auto r1 = check_existence_thm1(p.coeffs.b, C_P);
    if (p.bc != BoundaryKind::Dirichlet) {
        r1.satisfied = false;
        r1.witness = "stated for Dirichlet conditions only";
    } else if (!potential_vanishes(p)) {
        r1.satisfied = false;
        r1.witness = "stated without potential term (c = 0 or V = 0)";
    }
    reps.push_back(r1);
    reps.push_back(check_existence_thm2(p.coeffs));
    reps.push_back(check_existence_thm3(p.coeffs));
    reps.push_back(check_uniqueness(p.coeffs));
    return reps;
}

json certificate_json(const BoundCertificate& c)
{
    json consts = json::object();
    for (const auto& [k, v] : c.constants_used) consts[k] = v;
    return {{"theorem_id", std::string(to_string(c.kind))},
            {"lhs", c.lhs},
            {"rhs", c.rhs},
            {"slack", c.slack},
            {"constants_used", consts},
            {"defects",
             {{"re", c.defects.re_defect},
              {"im", c.defects.im_defect},
              {"re_relative", c.defects.re_relative},
              {"im_relative", c.defects.im_relative},
              {"residual_bound", c.defects.residual_bound}}},
            {"verdict", c.verdict}};
}

std::string solution_csv(const Field& u)
{
    const bool two_d = u.grid->dim() == 2;
    std::string s = two_d ? "x,y,re_u,im_u,abs_u\n" : "x,re_u,im_u,abs_u\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto [x, y] = u.grid->node(u.bc, i);
        const cplx z = u.values[i];
        if (two_d)
            s += fmt::format("{},{},{},{},{}\n", num(x), num(y), num(z.real()), num(z.imag()), num(std::abs(z)));
        else
            s += fmt::format("{},{},{},{}\n", num(x), num(z.real()), num(z.imag()), num(std::abs(z)));
    }
    return s;
}

double symmetry_defect_or_zero(const RunConfig& rc, const Field& u)
{
    return rc.symmetry ? symmetry_defect(u, *rc.symmetry) : 0.0;
}

struct SolveOutcome {
    SolveResult result;
    std::vector<BoundCertificate> certificates;
    std::optional<json> weighted_certificate;
    Norms norms;
};

SolveOutcome run_solve(const RunConfig& rc, const fs::path& out_dir)
{
    if (rc.weight && rc.symmetry) throw ConfigError("symmetric solves are not combined with weighted mode");
    const Problem problem = make_problem(rc);
    std::vector<std::string> warnings;
    std::string delta_reason = "set in config";
    if (!rc.solver.delta_shift) delta_reason = select_delta_shift(problem).reason;

    SolveOutcome out;
    std::optional<WeightConfig> weight;
    if (rc.weight) {
        weight = make_weight(problem.grid, rc.weight->alpha, rc.weight->kind);
        if (rc.source.name == "delta_pow" && !singular_source_admissible(rc.weight->alpha, rc.source.exponent))
            warnings.push_back(fmt::format("source exponent {} is not below (alpha + 1)/2 = {}: F is not in the "
                                           "weighted space and quadrature of its norm diverges",
                                           rc.source.exponent, 0.5 * (rc.weight->alpha + 1.0)));
        out.result = solve_weighted(problem, *weight, rc.solver);
    } else if (rc.symmetry) {
        out.result = solve_symmetric(problem, rc.solver, *rc.symmetry);
    } else {
        out.result = solve(problem, rc.solver);
    }
    const SolveResult& res = out.result;
    const Field& u = res.u;
    out.norms = norms(u, rc.coeffs.m + 1.0);

    // certificates for every bound whose hypotheses hold
    std::optional<double> C_P;
    if (problem.bc == BoundaryKind::Dirichlet) C_P = poincare_constant(problem.grid).C_P;
    if (C_P && potential_vanishes(problem) && check_existence_thm1(problem.coeffs.b, *C_P).satisfied)
        out.certificates.push_back(certify_thm_bound1(u, problem, *C_P));
    if (check_existence_thm2(problem.coeffs).satisfied) out.certificates.push_back(certify_thm_bound2(u, problem));
    if (potential_vanishes(problem) && satisfies_condition_ab(problem.coeffs.a, problem.coeffs.b))
        out.certificates.push_back(certify_thm_bound3(u, problem));

    json certs = json::array();
    for (const auto& c : out.certificates) certs.push_back(certificate_json(c));
    if (weight) {
        const auto basis = probe_basis(problem.grid, 20, 20, rc.seed);
        const double worst = weighted_residual_on_basis(u, problem, *weight, basis);
        double wmax = 0.0;
        for (double w : weight->weight_field) wmax = std::max(wmax, w);
        // ⟨r, w v⟩ <= ‖r‖ sqrt(max w) ‖v‖_w, plus a rounding allowance
        const double rhs = rc.solver.tol_residual * std::sqrt(wmax) + 1e-9;
        json wc = {{"theorem_id", "weighted_weak_form"},
                   {"lhs", worst},
                   {"rhs", rhs},
                   {"slack", 0.0},
                   {"constants_used",
                    {{"alpha", weight->alpha},
                     {"weighted_norm_F", std::sqrt(weighted_norm(problem.F, *weight))},
                     {"weighted_norm_u", std::sqrt(weighted_norm(u, *weight))},
                     {"weighted_energy_u", std::sqrt(weighted_energy(u, *weight))},
                     {"norm_F", l2_norm(problem.F)},
                     {"probe_fields", static_cast<double>(basis.size())}}},
                   {"defects", {{"re", 0.0}, {"im", 0.0}, {"re_relative", 0.0}, {"im_relative", 0.0},
                                {"residual_bound", res.residual}}},
                   {"verdict", worst <= rhs}};
        certs.push_back(wc);
        out.weighted_certificate = wc;
    }

    json history = json::array();
    for (const auto& r : res.diagnostics)
        history.push_back({{"iteration", r.iteration},
                           {"update", r.update},
                           {"truncated_residual", r.truncated_residual},
                           {"ell", r.ell},
                           {"damping", r.damping},
                           {"max_abs", r.max_abs},
                           {"truncation_active", r.truncation_active},
                           {"in_ball", r.in_ball},
                           {"nodal_shift", r.nodal_shift}});
    json hx = json::array(), nn = json::array();
    for (int k = 0; k < problem.grid->dim(); ++k) {
        hx.push_back(problem.grid->axis(k).h);
        nn.push_back(problem.grid->axis(k).n);
    }
    json diag = {{"command", "solve"},
                 {"status", std::string(to_string(res.status))},
                 {"converged", res.converged},
                 {"iterations", res.iterations},
                 {"nodal_shift_iterations", res.nodal_shift_iterations},
                 {"residual", res.residual},
                 {"update", res.update},
                 {"final_ell", res.final_ell},
                 {"delta_shift", res.delta_shift},
                 {"delta_reason", delta_reason},
                 {"truncation_active", res.truncation_active},
                 {"schauder_ball_ok", res.schauder_ball_ok},
                 {"symmetry", rc.symmetry ? json(std::string(to_string(*rc.symmetry))) : json(nullptr)},
                 {"symmetry_defect", symmetry_defect_or_zero(rc, u)},
                 {"weighted", rc.weight.has_value()},
                 {"grid", {{"dim", problem.grid->dim()}, {"n", nn}, {"h", hx}, {"bc", std::string(to_string(problem.bc))}}},
                 {"coefficients", coefficients_json(rc.coeffs)},
                 {"seed", rc.seed},
                 {"norms",
                  {{"l2", out.norms.l2},
                   {"h1_semi", out.norms.h1_semi},
                   {"lp", out.norms.lp},
                   {"p", rc.coeffs.m + 1.0},
                   {"linf", out.norms.linf}}},
                 {"warnings", warnings},
                 {"history", history}};

    fs::create_directories(out_dir);
    write_text(out_dir / "solution.csv", solution_csv(u));
    write_json(out_dir / "diagnostics.json", diag);
    write_json(out_dir / "certificates.json", certs);
    return out;
}


std::string cert_cell(const SolveOutcome& o, BoundKind kind)
{
    for (const auto& c : o.certificates)
        if (c.kind == kind) return c.verdict ? "pass" : "fail";
    return "n/a";
}

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::vector<std::string> split_values(const std::string& list)
{
    const char sep = list.find(';') != std::string::npos ? ';' : ',';
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(list);
    while (std::getline(is, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

struct Session {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    RawConfig raw() const
    {
        auto r = load_config(config_path);
        if (seed) r.set("seed", std::to_string(*seed));
        return r;
    }
    fs::path base_dir() const { return fs::path(config_path).parent_path(); }
    fs::path output(const RunConfig& rc) const
    {
        if (!out_dir.empty()) return out_dir;
        if (!rc.out_dir.empty()) return rc.out_dir;
        return "snls_out";
    }
};

int cmd_check(const Session& s, std::ostream& out)
{
    const auto rc = build_run_config(s.raw(), s.base_dir());
    const auto grid = make_grid(rc);
    Problem p;
    p.grid = grid;
    p.bc = rc.bc;
    p.coeffs = rc.coeffs;
    p.V = make_potential(rc, grid);
    p.F = Field(grid, rc.bc);
    const double C_P = poincare_constant(grid).C_P;
    const auto reps = hypothesis_reports(p, C_P);
    json arr = json::array();
    bool any_existence = false;
    for (const auto& r : reps) {
        arr.push_back(report_json(r));
        if (r.satisfied && (r.theorem_id == TheoremId::Exist1 || r.theorem_id == TheoremId::Exist2 ||
                            r.theorem_id == TheoremId::Exist3))
            any_existence = true;
        out << fmt::format("{:<6} {:<5} {}\n", to_string(r.theorem_id), r.satisfied ? "yes" : "no", r.witness);
    }
    if (!s.out_dir.empty() || !rc.out_dir.empty()) {
        const fs::path dir = s.output(rc);
        fs::create_directories(dir);
        write_json(dir / "reports.json", arr);
    }
    return any_existence ? kExitOk : kExitNoTheorem;
}

int cmd_solve(const Session& s, std::ostream& out)
{
    const auto rc = build_run_config(s.raw(), s.base_dir());
    const auto dir = s.output(rc);
    const auto o = run_solve(rc, dir);
    out << fmt::format("status {} after {} iterations, residual {:.3e}, ell {}\n", to_string(o.result.status),
                       o.result.iterations, o.result.residual, o.result.final_ell);
    for (const auto& c : o.certificates)
        out << fmt::format("{:<24} lhs {:.6e} rhs {:.6e} {}\n", to_string(c.kind), c.lhs, c.rhs,
                           c.verdict ? "pass" : "fail");
    if (o.weighted_certificate)
        out << fmt::format("{:<24} lhs {:.6e} rhs {:.6e} {}\n", "weighted_weak_form",
                           (*o.weighted_certificate)["lhs"].get<double>(),
                           (*o.weighted_certificate)["rhs"].get<double>(),
                           (*o.weighted_certificate)["verdict"].get<bool>() ? "pass" : "fail");
    return o.result.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Session& s, const std::string& axis, const std::string& values, std::ostream& out)
{
    const auto base = s.raw();
    const auto list = split_values(values);
    if (list.empty()) throw ConfigError("sweep needs at least one value");
    {
        RawConfig probe = base;
        probe.set(axis, list.front());  // rejects unknown axes before any work
    }
    const auto base_rc = build_run_config(base, s.base_dir());
    const fs::path dir = s.output(base_rc);
    fs::create_directories(dir);

    struct Row {
        std::string status = "error";
        std::string error;
        std::optional<SolveOutcome> outcome;
    };
    std::vector<std::future<Row>> jobs;
    for (std::size_t k = 0; k < list.size(); ++k) {
        jobs.push_back(std::async(std::launch::async, [&, k] {
            Row row;
            try {
                RawConfig r = base;
                r.set(axis, list[k]);
                const auto rc = build_run_config(r, s.base_dir());
                row.outcome = run_solve(rc, dir / fmt::format("entry_{:03d}", k));
                row.status = std::string(to_string(row.outcome->result.status));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::string csv = "index,value,status,iterations,residual,norm_l2,norm_h1_semi,norm_linf,"
                      "bound_gradient,bound_potential,bound_coefficient_pair,error\n";
    bool all_converged = true;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const Row row = jobs[k].get();
        if (row.outcome) {
            const auto& o = *row.outcome;
            all_converged = all_converged && o.result.converged;
            csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},\n", k, csv_quote(list[k]), row.status,
                               o.result.iterations, num(o.result.residual), num(o.norms.l2), num(o.norms.h1_semi),
                               num(o.norms.linf), cert_cell(o, BoundKind::Gradient), cert_cell(o, BoundKind::Potential),
                               cert_cell(o, BoundKind::CoefficientPair));
        } else {
            all_converged = false;
            csv += fmt::format("{},{},error,,,,,,,,,{}\n", k, csv_quote(list[k]), csv_quote(row.error));
        }
        out << fmt::format("{} = {}: {}\n", axis, list[k], row.outcome ? row.status : "error: " + row.error);
    }
    write_text(dir / "sweep.csv", csv);
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_hardy(const Session& s, std::ostream& out)
{
    const auto rc = build_run_config(s.raw(), s.base_dir());
    if (rc.bc != BoundaryKind::Dirichlet) throw ConfigError("the Hardy check needs Dirichlet conditions");
    const WeightSpec spec = rc.weight.value_or(WeightSpec{});
    const auto grid = make_grid(rc);
    const auto w = make_weight(grid, spec.alpha, spec.kind);
    const auto rep = hardy_check(w, rc.hardy_samples, rc.seed);
    json ratios = json::array();
    for (const auto& [id, r] : rep.ratios) ratios.push_back({{"field_id", id}, {"ratio", r}});
    json nn = json::array();
    for (int k = 0; k < grid->dim(); ++k) nn.push_back(grid->axis(k).n);
    json j = {{"command", "hardy"},
              {"alpha", spec.alpha},
              {"weight_kind", std::string(to_string(spec.kind))},
              {"n", nn},
              {"samples", rc.hardy_samples},
              {"seed", rc.seed},
              {"best_constant_estimate", rep.best_constant_estimate},
              {"worst_field_id", rep.worst_field_id},
              {"ratios", ratios}};
    const fs::path dir = s.output(rc);
    fs::create_directories(dir);
    write_json(dir / "hardy.json", j);
    out << fmt::format("best Hardy ratio {:.6f} from {}\n", rep.best_constant_estimate, rep.worst_field_id);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Solver and verifier for -Δu + a|u|^{-(1-m)}u + bu + cV²u = F"};
    app.require_subcommand(1);
    Session session;
    std::string axis, values;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", session.config_path, "Run configuration file")->required();
        sub->add_option("--out", session.out_dir, "Output directory");
        sub->add_option("--seed", seed, "Override the configuration seed");
    };
    auto* check = app.add_subcommand("check", "Report which existence and uniqueness results apply");
    auto* solve_cmd = app.add_subcommand("solve", "Solve and write solution, diagnostics and certificates");
    auto* sweep = app.add_subcommand("sweep", "Repeat solve over a list of values of one config key");
    auto* hardy = app.add_subcommand("hardy", "Estimate the weighted Hardy constant");
    for (auto* sub : {check, solve_cmd, sweep, hardy}) add_common(sub);
    sweep->add_option("--axis", axis, "Config key as section.key")->required();
    sweep->add_option("--values", values, "Values separated by ',' (or ';' when values contain commas)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }
    for (auto* sub : {check, solve_cmd, sweep, hardy})
        if (sub->count("--seed")) session.seed = seed;

    try {
        if (*check) return cmd_check(session, out);
        if (*solve_cmd) return cmd_solve(session, out);
        if (*sweep) return cmd_sweep(session, axis, values, out);
        if (*hardy) return cmd_hardy(session, out);
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const SolveError& e) {
        err << "solve failed: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    }
    return kExitInvalid;
}

}  // namespace snls
