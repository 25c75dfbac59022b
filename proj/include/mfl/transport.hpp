#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfl/dense.hpp"
#include "mfl/measures.hpp"

namespace mfl {

/// Coupling between two discrete weight vectors together with its cost
/// under the ground cost it was solved for.
struct TransportPlan {
    std::vector<double> row_weights;
    std::vector<double> col_weights;
    DenseMatrix plan;
    double cost = 0.0;
};

/// Exact discrete optimal transport between `rows` and `cols` (network
/// simplex on the complete bipartite graph). Weights must be nonnegative
/// with equal totals.
TransportPlan solve_transport(std::span<const double> rows, std::span<const double> cols, const DenseMatrix& cost);

/// Debug export: one line per nonzero plan entry, columns i,j,mass,cost.
void write_plan_csv(std::ostream& os, const TransportPlan& plan, const DenseMatrix& ground_cost);

// ---------------------------------------------------------------------------
// d2 on P(Ω), Ω ⊂ ℝ

/// Squared 2-Wasserstein distance via the L² distance of quantile functions,
/// integrated piecewise in closed form over merged CDF breakpoints.
double w2_squared(const Measure& a, const Measure& b);
double w2_quantile(const Measure& a, const Measure& b);

namespace detail {
/// Merged-breakpoint quantile integral without the equal-size empirical shortcut.
double w2_squared_general(const Measure& a, const Measure& b);
}  // namespace detail

// ---------------------------------------------------------------------------
// d2 on Ω^N between equal-size configurations

/// sqrt(min_σ (1/N) Σ |x_i − y_σ(i)|²) by sorting.
double w2_assignment(std::span<const double> x, std::span<const double> y);
/// Same quantity by an O(N³) assignment solve; cross-check only.
double w2_assignment_hungarian(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Nested distance on P(P(Ω))

struct NestedDistance {
    double distance = 0.0;  // 𝔇₂
    DenseMatrix ground_cost;  // d₂² between atoms
    TransportPlan plan;
};

inline constexpr std::size_t kMaxMetaAtoms = 2048;

NestedDistance nested_d2(const MetaMeasure& x, const MetaMeasure& y);

/// Both sides of the scaled isometry between symmetric N-particle laws and
/// their empirical lifts, estimated from two ensembles of M replicas each.
struct IsometryGap {
    double lhs = 0.0;  // (1/N) d₂²(μ^N, ν^N), assignment over replica configurations
    double rhs = 0.0;  // 𝔇₂²(μ̂^N, ν̂^N), nested transport over empirical atoms
    double gap = 0.0;  // lhs − rhs
};

IsometryGap isometry_gap(const ParticleEnsemble& a, const ParticleEnsemble& b);

}  // namespace mfl
