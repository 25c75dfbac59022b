#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfl/measures.hpp"
#include "mfl/potentials.hpp"

namespace mfl {

enum class ExperimentType {
    Simulate,
    SolvePde,
    ChaosSweep,
    EviCheck,
    EviLiftedCheck,
    GammaCheck,
    DfCheck,
    IsometryCheck,
};

std::string_view to_string(ExperimentType type);

/// One experiment read from an INI file with a single [experiment] section.
///
/// Keys (all lower-case, `key = value`, `#` or `;` starts a comment line):
///
///   experiment      simulate | solve-pde | chaos-sweep | evi-check |
///                   evi-lifted-check | gamma-check | df-check | isometry-check
///   seed            unsigned 64-bit integer (required)
///   out_dir         output directory (default ".")
///   V, H            potential specs: zero | quadratic:a=<r> | doublewell:a=<r>
///   left, right     interval; also the PDE grid and the SDE reflection domain
///   cells           PDE / density grid size
///   dt              SDE time step
///   pde_dt          PDE time step, 0 = largest stable step
///   t_end           final time (simulate, solve-pde)
///   snapshot_times  comma-separated times (simulate, solve-pde)
///   N, M            particles and replicas
///   N_list, t_list  comma-separated sweeps
///   n               marginal order (df-check)
///   sites           comma-separated site positions (df-check)
///   table           uniform | product:p=<p1>,..,<p_{k-1}> |
///                   mixture:<w>*<p1>/../<pk>;... | points:<i1> .. <iN>@<w>;...
///   rho0, rho1, rho2, nu
///                   density specs: gaussian:m=<r>,var=<r> | uniform:a=<r>,b=<r> |
///                   uniform | file:<path to a GridDensity CSV on the same grid>
///   s, t, lambda    EVI interval and convexity modulus
///
/// Every experiment accepts only the keys it uses; anything else is an error.
struct ExperimentConfig {
    ExperimentType type = ExperimentType::Simulate;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    std::string v_spec = "zero";
    std::string h_spec = "zero";
    double left = -8.0;
    double right = 8.0;
    std::size_t cells = 1024;

    double dt = 1e-3;
    double pde_dt = 0.0;
    double t_end = 1.0;
    std::vector<double> snapshot_times;

    std::size_t n_particles = 0;
    std::size_t n_replicas = 0;
    std::vector<std::size_t> n_list;
    std::vector<double> t_list;

    std::size_t marginal_order = 0;
    std::vector<double> sites;
    std::string table;

    std::string rho0;
    std::string rho1;
    std::string rho2;
    std::string nu;

    double s = 0.0;
    double t = 0.0;
    double lambda = 0.0;

    Potential v() const;
    Potential h() const;
};

/// Strict parser. Syntax errors carry the line number; missing or invalid
/// fields are named. `seed_override` satisfies a missing `seed` key.
ExperimentConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Density spec on the grid [left, right] with `cells` cells.
GridDensity parse_density(std::string_view spec, double left, double right, std::size_t cells);

/// Table spec over `sites` for N variables.
DiscreteSymmetricMeasure parse_table(std::string_view spec, const std::vector<double>& sites, std::size_t n);

}  // namespace mfl
