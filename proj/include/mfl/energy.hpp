#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "mfl/measures.hpp"
#include "mfl/potentials.hpp"

namespace mfl {

/// W^N(x) = Σ V(x_i) + (1/2N) Σ_{i≠j} H(x_i − x_j), ordered pairs.
/// Throws ArgumentError if H is not symmetric.
double w_n(std::span<const double> config, const Potential& v, const Potential& h);

/// D²W^N[v, v] from the exact second derivatives of V and H.
double hessian_quadratic_form(std::span<const double> config, std::span<const double> dir, const Potential& v,
                              const Potential& h);

/// Second central difference of W^N along `dir`, scaled by 1/eps².
double hessian_quadratic_form_fd(std::span<const double> config, std::span<const double> dir, const Potential& v,
                                 const Potential& h, double eps = 1e-4);

/// Minimum of D²W^N[v, v] over `trials` random configurations in the scan
/// interval and random unit directions.
double convexity_modulus_estimate(const Potential& v, const Potential& h, std::size_t n, std::size_t trials,
                                  std::uint64_t seed);

struct ScanSpec {
    double lo = -4.0;
    double hi = 4.0;
    std::size_t points = 401;
};

struct DoublingResult {
    bool holds = false;
    double constant = 0.0;  // smallest C with H(x+y) ≤ C(1 + H(x) + H(y)) on the scan, H shifted to be ≥ 0
};

DoublingResult doubling_check(const Potential& h, const ScanSpec& scan);

struct EnergyReport {
    double confinement = 0.0;
    double interaction = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

/// ∬ H(x − y) dρ dρ by midpoint quadrature on cell centers.
double interaction_integral(const GridDensity& rho, const Potential& h);

/// Σ m log(m / Δx) with 0 log 0 = 0.
double grid_entropy(const GridDensity& rho);

/// Mean-field free energy ∫V dρ + ½∬H dρdρ + ∫ρ log ρ.
EnergyReport free_energy_mf(const GridDensity& rho, const Potential& v, const Potential& h);

/// F^N[ρ^{⊗N}] / N in closed form: ∫V dρ + ((N−1)/2N)∬H dρdρ + ∫ρ log ρ.
double free_energy_product(const GridDensity& rho, std::size_t n, const Potential& v, const Potential& h);

/// Σ_i w_i F^MF[ρ_i]; throws for empirical atoms.
double free_energy_meta(const MetaMeasure& x, const Potential& v, const Potential& h);

}  // namespace mfl
