#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mfl {

/// Probability measure on the interval [left, right] discretized into
/// equal cells. Stores per-cell masses; the density in a cell is
/// mass / width.
class GridDensity {
public:
    GridDensity(double left, double right, std::vector<double> mass);

    /// Uniform mass on every cell.
    static GridDensity uniform(double left, double right, std::size_t cells);
    /// Uniform density on [a, b] ⊂ [left, right]; cells straddling a or b
    /// receive the overlapping fraction.
    static GridDensity uniform_on(double left, double right, std::size_t cells, double a, double b);
    /// Normal(mean, variance) integrated over each cell and renormalized
    /// after truncation to the domain.
    static GridDensity gaussian(double left, double right, std::size_t cells, double mean, double variance);
    /// All mass in the cell containing x.
    static GridDensity point_mass(double left, double right, std::size_t cells, double x);
    /// Unnormalized nonnegative weights, normalized on construction.
    static GridDensity from_weights(double left, double right, std::vector<double> weights);

    double left() const { return left_; }
    double right() const { return right_; }
    std::size_t cells() const { return mass_.size(); }
    double width() const { return (right_ - left_) / static_cast<double>(mass_.size()); }
    double center(std::size_t c) const { return left_ + (static_cast<double>(c) + 0.5) * width(); }
    double face(std::size_t f) const { return left_ + static_cast<double>(f) * width(); }
    std::span<const double> mass() const { return mass_; }
    double density(std::size_t c) const { return mass_[c] / width(); }

    double mean() const;
    double variance() const;
    bool same_grid(const GridDensity& other) const;

private:
    double left_;
    double right_;
    std::vector<double> mass_;
};

/// N equally weighted atoms, stored sorted.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<double> atoms);

    std::span<const double> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> atoms_;
};

/// T^N: configuration -> (1/N) Σ δ_{x_i}. Throws on empty input.
EmpiricalMeasure empirical_lift(std::span<const double> config);

using Measure = std::variant<GridDensity, EmpiricalMeasure>;

/// Finitely supported probability measure on measures.
class MetaMeasure {
public:
    MetaMeasure(std::vector<double> weights, std::vector<Measure> atoms);

    static MetaMeasure dirac(Measure atom);
    /// Equal weights 1/M over the given atoms.
    static MetaMeasure uniform(std::vector<Measure> atoms);

    std::span<const double> weights() const { return weights_; }
    const std::vector<Measure>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> weights_;
    std::vector<Measure> atoms_;
};

/// M independent N-particle configurations, stored row-major (replica, particle).
class ParticleEnsemble {
public:
    ParticleEnsemble(std::size_t n_particles, std::size_t n_replicas, std::vector<double> positions,
                     std::uint64_t seed);

    std::size_t n_particles() const { return n_particles_; }
    std::size_t n_replicas() const { return n_replicas_; }
    std::uint64_t seed() const { return seed_; }
    std::span<const double> configuration(std::size_t replica) const;
    std::span<double> configuration(std::size_t replica);
    std::span<const double> positions() const { return positions_; }

    EmpiricalMeasure empirical(std::size_t replica) const;
    /// Uniform-weight meta-measure over the replica empirical measures.
    MetaMeasure empirical_meta() const;

private:
    std::size_t n_particles_;
    std::size_t n_replicas_;
    std::vector<double> positions_;
    std::uint64_t seed_;
};

/// M·N i.i.d. draws from rho by inverse CDF on the grid, uniform within
/// the selected cell. Deterministic in seed.
ParticleEnsemble sample_product(const GridDensity& rho, std::size_t n_particles, std::size_t n_replicas,
                                std::uint64_t seed);

/// Exact probability table over sites^n, indexed in base k with the first
/// variable most significant.
class DiscreteSymmetricMeasure {
public:
    static constexpr std::size_t kMaxEntries = 10'000'000;

    /// Validates nonnegativity, unit mass and permutation symmetry.
    DiscreteSymmetricMeasure(std::vector<double> sites, std::size_t n, std::vector<double> table);

    /// ρ^{⊗n} with ρ given by per-site probabilities.
    static DiscreteSymmetricMeasure product(std::vector<double> sites, std::span<const double> probs,
                                            std::size_t n);
    /// Σ_w w · ρ_w^{⊗n}.
    static DiscreteSymmetricMeasure mixture(std::vector<double> sites, std::span<const double> weights,
                                            const std::vector<std::vector<double>>& components,
                                            std::size_t n);
    static DiscreteSymmetricMeasure uniform(std::vector<double> sites, std::size_t n);

    std::span<const double> sites() const { return sites_; }
    std::size_t k() const { return sites_.size(); }
    std::size_t n() const { return n_; }
    std::span<const double> table() const { return table_; }
    double at(std::span<const std::size_t> tuple) const;

    std::size_t index_of(std::span<const std::size_t> tuple) const;
    std::vector<std::size_t> tuple_of(std::size_t index) const;

private:
    std::vector<double> sites_;
    std::size_t n_;
    std::vector<double> table_;
};

/// Number of entries k^n, or throws if it exceeds the table cap.
std::size_t checked_table_size(std::size_t k, std::size_t n);

/// n-variable marginal of m (sums out the trailing variables).
DiscreteSymmetricMeasure marginal(const DiscreteSymmetricMeasure& m, std::size_t n);

/// T^N_# m, grouping tuples by their empirical measure.
MetaMeasure discrete_empirical_pushforward(const DiscreteSymmetricMeasure& m);

/// ∫ ρ^{⊗n} dX(ρ) for X with empirical atoms supported on `sites`.
DiscreteSymmetricMeasure tensor_lift(const MetaMeasure& x, std::size_t n, std::span<const double> sites);
/// Same, using the sorted union of all atom positions as the site set.
DiscreteSymmetricMeasure tensor_lift(const MetaMeasure& x, std::size_t n);

}  // namespace mfl
