#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfl/measures.hpp"
#include "mfl/potentials.hpp"

namespace mfl {

struct Domain {
    double left = -8.0;
    double right = 8.0;
    bool bounded = true;

    bool contains(double x) const { return !bounded || (x >= left && x <= right); }
};

struct SdeConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Potential v = Potential::zero();
    Potential h = Potential::zero();
    Domain domain;
    std::uint64_t seed = 0;
    std::vector<double> snapshot_times;

    /// Throws ArgumentError on inconsistent times, NumericalError when
    /// dt · (drift Lipschitz scale) ≥ 0.5.
    void validate() const;
    /// max|V''| on the domain plus max|H''| on pair differences.
    double drift_lipschitz() const;
};

/// One Euler–Maruyama step of every replica:
///   x_i ← x_i − [V'(x_i) + (1/N) Σ_{j≠i} H'(x_i − x_j)] dt + sqrt(2 dt) ξ_i
/// followed by folding back into a bounded domain. ξ for (replica, particle)
/// is drawn from a counter-based stream keyed by (seed, replica, label,
/// step_index); labels default to the particle index.
ParticleEnsemble step(const ParticleEnsemble& ensemble, const SdeConfig& cfg, std::uint64_t step_index,
                      std::span<const std::uint32_t> labels = {});

struct EnsembleSnapshot {
    double time = 0.0;
    ParticleEnsemble ensemble;
};

/// Steps from 0 to t_end with dt shrunk so that t_end is a whole number of
/// steps; records snapshots at the grid times nearest cfg.snapshot_times
/// (0 and t_end when none are given).
std::vector<EnsembleSnapshot> evolve(const ParticleEnsemble& ensemble, const SdeConfig& cfg);

/// Reflection of x into [left, right].
double fold_into(double x, double left, double right);

/// Snapshot export with columns time,replica,particle,position.
void write_snapshots_csv(std::ostream& os, const std::vector<EnsembleSnapshot>& snaps);

/// Pooled histogram of all particle positions on the given grid.
GridDensity histogram(const ParticleEnsemble& ensemble, double left, double right, std::size_t cells);

}  // namespace mfl
