#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mfl/measures.hpp"
#include "mfl/potentials.hpp"

namespace mfl {

struct GridSpec {
    double left = -8.0;
    double right = 8.0;
    std::size_t cells = 1024;

    double width() const { return (right - left) / static_cast<double>(cells); }
};

struct PdeConfig {
    double dt = 0.0;  // 0 selects max_stable_dt()
    double t_end = 1.0;
    Potential v = Potential::zero();
    Potential h = Potential::zero();
    GridSpec grid;
    std::vector<double> snapshot_times;

    /// Largest admissible step, 0.4 Δx² / (2 + Δx max|drift|) with max|drift|
    /// bounded by max|V'| on the grid plus max|H'| on pair differences.
    double max_stable_dt() const;
    double effective_dt() const { return dt > 0.0 ? dt : max_stable_dt(); }
    /// Throws ConfigError when dt violates the bound.
    void validate() const;
};

/// One explicit step of ∂_t ρ + ∂_x((V' + H' * ρ) ρ) = ∂_xx ρ with zero flux at
/// both ends. Face fluxes use the exponentially fitted (Scharfetter–Gummel)
/// upwind weighting of the cell-center potential Φ = V + H * ρ, which reduces
/// to first-order upwinding at large cell Péclet numbers and to centered
/// differences as the drift vanishes. Mass is conserved by telescoping.
GridDensity semigroup_step(const GridDensity& rho, const PdeConfig& cfg);

struct DensitySnapshot {
    double time = 0.0;
    GridDensity rho;
};

using StepObserver = std::function<void(double time, const GridDensity& rho)>;

/// Iterates semigroup_step to t_end (dt shrunk to divide t_end) and records
/// snapshots at the nearest grid times (0 and t_end when none requested).
/// The observer, if set, sees every accepted state including the initial one.
std::vector<DensitySnapshot> solve(const GridDensity& rho0, const PdeConfig& cfg, const StepObserver& observer = {});

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the Ornstein–Uhlenbeck flow (V = x²/2, H = 0) at time t.
Moments ou_oracle(double m0, double var0, double t);

/// d₂² between N(m1, v1) and N(m2, v2): (m1 − m2)² + (σ1 − σ2)².
double gaussian_w2_squared(double m1, double v1, double m2, double v2);

/// F^MF of N(m, v) for V = a x²/2, H = 0 in closed form.
double gaussian_free_energy_ou(double m, double v, double a = 1.0);

/// Snapshot export with columns time,cell_center,mass,density_value.
void write_snapshots_csv(std::ostream& os, const std::vector<DensitySnapshot>& snaps);

}  // namespace mfl
