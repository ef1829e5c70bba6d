#include "snls/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace snls {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_double(std::string_view s, std::string_view what)
{
    const std::string t = trim(s);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", what, t));
    return v;
}

std::uint64_t parse_uint(std::string_view s, std::string_view what)
{
    const std::string t = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(fmt::format("{}: '{}' is not a nonnegative integer", what, t));
    return v;
}

bool parse_bool(std::string_view s, std::string_view what)
{
    const std::string t = lower(trim(s));
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", what, t));
}

std::vector<double> parse_list(std::string_view s, std::string_view what)
{
    std::vector<double> out;
    std::string item;
    std::istringstream is{std::string(s)};
    while (std::getline(is, item, ',')) out.push_back(parse_double(item, what));
    return out;
}

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"seed"}},
        {"domain", {"kind", "bounds", "n", "bc"}},
        {"coefficients", {"a", "b", "c", "m"}},
        {"potential", {"name"}},
        {"source", {"name", "amplitude", "exponent", "modes"}},
        {"solver",
         {"delta", "damping", "min_damping", "tol_update", "tol_residual", "max_iter", "ell_initial",
          "ell_growth", "ell_stall_tol", "random_initial", "initial_scale", "symmetry",
          "nodal_shift_fallback", "stall_window"}},
        {"weight", {"alpha", "kind"}},
        {"hardy", {"samples"}},
        {"output", {"dir"}},
    };
    return keys;
}

void check_known(const std::string& section, const std::string& key)
{
    const auto& k = known_keys();
    const auto it = k.find(section);
    if (it == k.end()) throw ConfigError(fmt::format("unknown section [{}]", section));
    if (!it->second.count(key))
        throw ConfigError(section.empty() ? fmt::format("unknown top-level key '{}'", key)
                                          : fmt::format("unknown key '{}' in [{}]", key, section));
}

std::vector<std::string> read_csv_rows(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        // skip a header row
        if (rows.empty() && std::isalpha(static_cast<unsigned char>(t[0]))) continue;
        rows.push_back(t);
    }
    return rows;
}

std::vector<double> split_numbers(const std::string& row, const std::string& what)
{
    return parse_list(row, what);
}

std::filesystem::path resolve(const RunConfig& rc, const std::string& p)
{
    std::filesystem::path path(p);
    if (path.is_relative() && !rc.base_dir.empty()) path = rc.base_dir / path;
    return path;
}

}  // namespace

const std::string* RawConfig::find(const std::string& section, const std::string& key) const
{
    const auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void RawConfig::set(std::string_view path, std::string value)
{
    const auto dot = path.find('.');
    const std::string section = dot == std::string_view::npos ? "" : std::string(path.substr(0, dot));
    const std::string key(dot == std::string_view::npos ? path : path.substr(dot + 1));
    check_known(section, key);
    sections[section][key] = std::move(value);
}

RawConfig parse_config_text(std::string_view text)
{
    RawConfig raw;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", lineno));
            section = lower(trim(std::string_view(t).substr(1, t.size() - 2)));
            if (!known_keys().count(section)) throw ConfigError(fmt::format("line {}: unknown section [{}]", lineno, section));
            raw.sections[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
        const std::string key = lower(trim(std::string_view(t).substr(0, eq)));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
        try {
            check_known(section, key);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
        }
        if (raw.sections[section].count(key))
            throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
        raw.sections[section][key] = value;
    }
    return raw;
}

RawConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

cplx parse_complex(std::string_view s)
{
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t.empty()) throw ConfigError("empty complex number");
    if (t.back() != 'i') return {parse_double(t, "complex number"), 0.0};
    t.pop_back();
    // split at the last sign that is not an exponent sign and not leading
    std::size_t split = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re_part = split == std::string::npos ? "" : t.substr(0, split);
    std::string im_part = split == std::string::npos ? t : t.substr(split);
    if (im_part.empty() || im_part == "+") im_part = "1";
    else if (im_part == "-") im_part = "-1";
    const double re = re_part.empty() ? 0.0 : parse_double(re_part, "complex number");
    return {re, parse_double(im_part, "complex number")};
}

std::string format_complex(cplx z)
{
    return fmt::format("{}{}{}i", z.real(), z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+", std::abs(z.imag()));
}

RunConfig build_run_config(const RawConfig& raw, const std::filesystem::path& base_dir)
{
    RunConfig rc;
    rc.base_dir = base_dir;
    auto get = [&](const std::string& sec, const std::string& key) { return raw.find(sec, key); };
    auto need = [&](const std::string& sec, const std::string& key) -> const std::string& {
        const auto* v = get(sec, key);
        if (!v) throw ConfigError(fmt::format("missing required key [{}] {}", sec, key));
        return *v;
    };

    if (const auto* v = get("", "seed")) rc.seed = parse_uint(*v, "seed");

    // domain
    const std::string kind = lower(need("domain", "kind"));
    const auto bounds = parse_list(need("domain", "bounds"), "domain.bounds");
    std::vector<double> nvals = parse_list(need("domain", "n"), "domain.n");
    try {
        if (kind == "interval") {
            if (bounds.size() != 2) throw ConfigError("interval bounds need 2 numbers");
            rc.domain = Domain::interval(bounds[0], bounds[1]);
        } else if (kind == "rectangle") {
            if (bounds.size() != 4) throw ConfigError("rectangle bounds need 4 numbers");
            rc.domain = Domain::rectangle(bounds[0], bounds[1], bounds[2], bounds[3]);
        } else {
            throw ConfigError(fmt::format("unknown domain kind '{}'", kind));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (nvals.size() == 1 && rc.domain.dim() == 2) nvals.push_back(nvals[0]);
    if (nvals.size() != static_cast<std::size_t>(rc.domain.dim()))
        throw ConfigError("domain.n needs one count per axis");
    for (double v : nvals) {
        if (v < 3 || v != std::floor(v) || v > 1e7) throw ConfigError("domain.n entries must be integers >= 3");
        rc.n.push_back(static_cast<std::size_t>(v));
    }
    if (const auto* v = get("domain", "bc")) {
        const std::string bc = lower(*v);
        if (bc == "dirichlet") rc.bc = BoundaryKind::Dirichlet;
        else if (bc == "neumann") rc.bc = BoundaryKind::Neumann;
        else throw ConfigError(fmt::format("unknown boundary condition '{}'", bc));
    }

    // coefficients
    if (const auto* v = get("coefficients", "a")) rc.coeffs.a = parse_complex(*v);
    if (const auto* v = get("coefficients", "b")) rc.coeffs.b = parse_complex(*v);
    if (const auto* v = get("coefficients", "c")) rc.coeffs.c = parse_complex(*v);
    if (const auto* v = get("coefficients", "m")) rc.coeffs.m = parse_double(*v, "coefficients.m");
    try {
        rc.coeffs.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (const auto* v = get("potential", "name")) rc.potential = *v;
    {
        const std::string p = lower(rc.potential);
        if (p != "zero" && p != "harmonic" && rc.potential.rfind("csv:", 0) != 0)
            throw ConfigError(fmt::format("unknown potential '{}'", rc.potential));
        if (rc.potential.rfind("csv:", 0) != 0) rc.potential = p;
    }

    if (const auto* v = get("source", "name")) rc.source.name = *v;
    if (rc.source.name.rfind("csv:", 0) != 0) {
        rc.source.name = lower(rc.source.name);
        static const std::set<std::string> names = {"constant", "sine", "cosine", "delta_pow", "random_smooth"};
        if (!names.count(rc.source.name)) throw ConfigError(fmt::format("unknown source '{}'", rc.source.name));
    }
    if (const auto* v = get("source", "amplitude")) rc.source.amplitude = parse_complex(*v);
    if (const auto* v = get("source", "exponent")) rc.source.exponent = parse_double(*v, "source.exponent");
    if (const auto* v = get("source", "modes")) rc.source.modes = parse_uint(*v, "source.modes");
    if (rc.source.name == "delta_pow" && rc.bc != BoundaryKind::Dirichlet)
        throw ConfigError("delta_pow sources need Dirichlet conditions");
    if (rc.source.modes == 0) throw ConfigError("source.modes must be positive");

    // solver
    auto& s = rc.solver;
    if (const auto* v = get("solver", "delta")) {
        if (lower(*v) != "auto") s.delta_shift = parse_double(*v, "solver.delta");
    }
    if (const auto* v = get("solver", "damping")) s.damping = parse_double(*v, "solver.damping");
    if (const auto* v = get("solver", "min_damping")) s.min_damping = parse_double(*v, "solver.min_damping");
    s.min_damping = std::min(s.min_damping, s.damping);
    if (const auto* v = get("solver", "tol_update")) s.tol_update = parse_double(*v, "solver.tol_update");
    if (const auto* v = get("solver", "tol_residual")) s.tol_residual = parse_double(*v, "solver.tol_residual");
    if (const auto* v = get("solver", "max_iter")) s.max_iter = parse_uint(*v, "solver.max_iter");
    if (const auto* v = get("solver", "ell_initial")) s.ell_initial = parse_double(*v, "solver.ell_initial");
    if (const auto* v = get("solver", "ell_growth")) s.ell_growth = parse_double(*v, "solver.ell_growth");
    if (const auto* v = get("solver", "ell_stall_tol")) s.ell_stall_tol = parse_double(*v, "solver.ell_stall_tol");
    if (const auto* v = get("solver", "random_initial")) s.random_initial = parse_bool(*v, "solver.random_initial");
    if (const auto* v = get("solver", "initial_scale")) s.initial_scale = parse_double(*v, "solver.initial_scale");
    if (const auto* v = get("solver", "nodal_shift_fallback"))
        s.nodal_shift_fallback = parse_bool(*v, "solver.nodal_shift_fallback");
    if (const auto* v = get("solver", "stall_window")) s.stall_window = parse_uint(*v, "solver.stall_window");
    if (const auto* v = get("solver", "symmetry")) {
        const std::string sym = lower(*v);
        if (sym == "even") rc.symmetry = Symmetry::Even1D;
        else if (sym == "odd") rc.symmetry = Symmetry::Odd1D;
        else if (sym == "mirror_x") rc.symmetry = Symmetry::MirrorX;
        else if (sym == "mirror_y") rc.symmetry = Symmetry::MirrorY;
        else if (sym != "none") throw ConfigError(fmt::format("unknown symmetry '{}'", sym));
    }
    s.seed = rc.seed;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (raw.sections.count("weight")) {
        WeightSpec w;
        if (const auto* v = get("weight", "alpha")) w.alpha = parse_double(*v, "weight.alpha");
        if (const auto* v = get("weight", "kind")) {
            const std::string k = lower(*v);
            if (k == "boundary_distance") w.kind = WeightKind::BoundaryDistance;
            else if (k == "first_eigenfunction") w.kind = WeightKind::FirstEigenfunction;
            else throw ConfigError(fmt::format("unknown weight kind '{}'", k));
        }
        if (!(w.alpha > 0.0 && w.alpha < 1.0)) throw ConfigError("weight.alpha must lie in (0, 1)");
        if (rc.bc != BoundaryKind::Dirichlet) throw ConfigError("weighted mode needs Dirichlet conditions");
        rc.weight = w;
    }
    if (const auto* v = get("hardy", "samples")) rc.hardy_samples = parse_uint(*v, "hardy.samples");
    if (const auto* v = get("output", "dir")) rc.out_dir = *v;
    return rc;
}

GridPtr make_grid(const RunConfig& rc) { return build_grid(rc.domain, rc.n); }

std::vector<double> make_potential(const RunConfig& rc, const GridPtr& grid)
{
    const std::size_t n = grid->node_count(rc.bc);
    if (rc.potential == "zero") return {};
    std::vector<double> V(n);
    if (rc.potential == "harmonic") {
        for (std::size_t i = 0; i < n; ++i) {
            const auto [x, y] = grid->node(rc.bc, i);
            V[i] = x * x + y * y;
        }
        return V;
    }
    const auto rows = read_csv_rows(resolve(rc, rc.potential.substr(4)));
    if (rows.size() != n)
        throw ConfigError(fmt::format("potential csv has {} rows, grid needs {}", rows.size(), n));
    for (std::size_t i = 0; i < n; ++i) V[i] = split_numbers(rows[i], "potential csv").back();
    return V;
}

Field make_source(const RunConfig& rc, const GridPtr& grid)
{
    const auto& src = rc.source;
    const auto& d = rc.domain;
    auto unit = [&](int k, double x) {
        return (x - d.bounds[k].first) / (d.bounds[k].second - d.bounds[k].first);
    };
    const double pi = std::numbers::pi;
    if (src.name == "constant")
        return Field::from_function(grid, rc.bc, [&](double, double) { return src.amplitude; });
    if (src.name == "sine")
        return Field::from_function(grid, rc.bc, [&](double x, double y) {
            double s = std::sin(pi * unit(0, x));
            if (d.dim() == 2) s *= std::sin(pi * unit(1, y));
            return src.amplitude * s;
        });
    if (src.name == "cosine")
        return Field::from_function(grid, rc.bc, [&](double x, double y) {
            double s = std::cos(pi * unit(0, x));
            if (d.dim() == 2) s *= std::cos(pi * unit(1, y));
            return src.amplitude * s;
        });
    if (src.name == "delta_pow")
        return Field::from_function(grid, rc.bc, [&](double x, double y) {
            return src.amplitude * std::pow(boundary_distance(d, x, y), -src.exponent);
        });
    if (src.name == "random_smooth") {
        std::mt19937_64 rng(rc.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t K = src.modes;
        const std::size_t L = d.dim() == 2 ? K : 1;
        std::vector<cplx> coef(K * L);
        for (auto& c : coef) {
            const double re = normal(rng);
            const double im = normal(rng);
            c = cplx{re, im};
        }
        return Field::from_function(grid, rc.bc, [&](double x, double y) {
            cplx s{0.0, 0.0};
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t l = 0; l < L; ++l) {
                    double b = std::sin(pi * static_cast<double>(k + 1) * unit(0, x)) / static_cast<double>(k + 1);
                    if (d.dim() == 2) b *= std::sin(pi * static_cast<double>(l + 1) * unit(1, y)) / static_cast<double>(l + 1);
                    s += coef[k * L + l] * b;
                }
            return src.amplitude * s;
        });
    }
    // csv:PATH with rows "re,im" (or "x[,y],re,im") in field order
    const auto rows = read_csv_rows(resolve(rc, src.name.substr(4)));
    Field F(grid, rc.bc);
    if (rows.size() != F.size())
        throw ConfigError(fmt::format("source csv has {} rows, grid needs {}", rows.size(), F.size()));
    for (std::size_t i = 0; i < F.size(); ++i) {
        const auto nums = split_numbers(rows[i], "source csv");
        if (nums.size() < 2) throw ConfigError("source csv rows need re,im");
        F.values[i] = src.amplitude * cplx{nums[nums.size() - 2], nums.back()};
    }
    return F;
}

Problem make_problem(const RunConfig& rc)
{
    Problem p;
    p.grid = make_grid(rc);
    p.bc = rc.bc;
    p.coeffs = rc.coeffs;
    p.V = make_potential(rc, p.grid);
    p.F = make_source(rc, p.grid);
    p.validate();
    return p;
}

}  // namespace snls
