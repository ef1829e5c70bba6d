#pragma once

// Run configuration: a sectioned key = value text file.
//
//     seed = 7
//     [domain]       kind = interval | rectangle, bounds = 0,1[,0,2], n = 64[,64], bc = dirichlet | neumann
//     [coefficients] a = 1-2i, b = -i, c = 0, m = 0.5
//     [potential]    name = zero | harmonic | csv:PATH
//     [source]       name = constant | sine | cosine | delta_pow | random_smooth | csv:PATH,
//                    amplitude = 1, exponent = 0.6, modes = 6
//     [solver]       delta = auto | number, damping, tol_update, tol_residual, max_iter,
//                    ell_initial, ell_growth, ell_stall_tol, random_initial, initial_scale,
//                    nodal_shift_fallback, stall_window,
//                    symmetry = none | even | odd | mirror_x | mirror_y
//     [weight]       alpha = 0.5, kind = boundary_distance | first_eigenfunction
//     [hardy]        samples = 20
//     [output]       dir = PATH
//
// Complex values are written "re+imi" ("1-2i", "-i", "0.5", "3i"). Lines
// starting with '#' or ';' are comments. Unknown sections or keys are errors.

#include "snls/solver.hpp"
#include "snls/weighted.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snls {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RawConfig {
    // Section "" holds top-level keys.
    std::map<std::string, std::map<std::string, std::string>> sections;

    const std::string* find(const std::string& section, const std::string& key) const;
    // path is "section.key" (or "key" for top level).
    void set(std::string_view path, std::string value);
};

RawConfig parse_config_text(std::string_view text);
RawConfig load_config(const std::filesystem::path& path);

cplx parse_complex(std::string_view s);
std::string format_complex(cplx z);

struct SourceSpec {
    std::string name = "constant";
    cplx amplitude{1.0, 0.0};
    double exponent = 0.6;
    std::size_t modes = 6;
};

struct WeightSpec {
    double alpha = 0.5;
    WeightKind kind = WeightKind::BoundaryDistance;
};

struct RunConfig {
    Domain domain;
    std::vector<std::size_t> n;
    BoundaryKind bc = BoundaryKind::Dirichlet;
    CoefficientTriple coeffs;
    std::string potential = "zero";
    SourceSpec source;
    SolverConfig solver;
    std::optional<Symmetry> symmetry;
    std::optional<WeightSpec> weight;
    std::size_t hardy_samples = 20;
    std::string out_dir;
    std::uint64_t seed = 0;
    // Directory that relative csv: paths resolve against.
    std::filesystem::path base_dir;
};

RunConfig build_run_config(const RawConfig& raw, const std::filesystem::path& base_dir = {});

GridPtr make_grid(const RunConfig& rc);
std::vector<double> make_potential(const RunConfig& rc, const GridPtr& grid);
Field make_source(const RunConfig& rc, const GridPtr& grid);
Problem make_problem(const RunConfig& rc);

}  // namespace snls
