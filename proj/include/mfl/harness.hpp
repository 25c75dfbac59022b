#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfl/mckean_vlasov.hpp"
#include "mfl/measures.hpp"
#include "mfl/particles.hpp"
#include "mfl/potentials.hpp"

namespace mfl {

struct CheckResult {
    enum class Mode { Inequality, Identity };

    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs − lhs (inequality) or |lhs − rhs| (identity)
    double tolerance = 0.0;
    bool passed = false;
    Mode mode = Mode::Inequality;
    bool conditional = false;  // excluded from the CLI exit code
    std::map<std::string, std::string> metadata;

    static CheckResult inequality(std::string name, double lhs, double rhs, double tolerance);
    static CheckResult identity(std::string name, double lhs, double rhs, double tolerance);
};

/// Results CSV header and rows: name,lhs,rhs,margin,tolerance,passed,metadata.
void write_results_csv(std::ostream& os, std::span<const CheckResult> results);
std::string metadata_json(const std::map<std::string, std::string>& metadata);

/// Substream seed for a named check.
std::uint64_t check_seed(std::uint64_t master, const std::string& name);

// ---------------------------------------------------------------------------
// Finite exchangeability

/// Fraction of maps {1..n} → {1..N} that are injective, by enumeration.
/// This is the weight of μ^N_n inside (μ̂^N)^n.
double injective_map_fraction(std::size_t big_n, std::size_t n);

/// Largest c with (μ̂^N)^n − c·μ^N_n ≥ 0 entrywise, for this particular m.
double max_decomposition_coefficient(const DiscreteSymmetricMeasure& m, std::size_t n);

/// Σ|μ^N_n − (μ̂^N)^n| over tuples against 2n(n−1)/N.
CheckResult df_check(const DiscreteSymmetricMeasure& m, std::size_t n);

// ---------------------------------------------------------------------------
// Evolution variational inequalities

/// ∫_0^τ e^{κ r} dr.
double evi_weight(double kappa, double tau);

/// Declared grid budget used as EVI tolerance: 1e-6 + Δx².
double evi_discretization_budget(const GridSpec& grid);

/// e^{λτ}/2 d₂²(S_τρ₁, ρ₂) − ½ d₂²(ρ₁, ρ₂) ≤ (∫_0^τ e^{λr}dr)(F[ρ₂] − F[S_τρ₁]), τ = t − s,
/// with S from the PDE solver on cfg.grid.
CheckResult evi_mf_check(const GridDensity& rho1, const GridDensity& rho2, double s, double t, double lambda,
                         const PdeConfig& cfg);

/// Same four terms for Gaussians under the OU flow (V = a x²/2, H = 0), in closed form.
struct EviTerms {
    double d2_after = 0.0;   // d₂²(S_τρ₁, ρ₂)
    double d2_before = 0.0;  // d₂²(ρ₁, ρ₂)
    double energy_target = 0.0;  // F[ρ₂]
    double energy_after = 0.0;   // F[S_τρ₁]
    double lhs = 0.0;
    double rhs = 0.0;
};
EviTerms evi_ou_gaussian_oracle(double m1, double v1, double m2, double v2, double tau, double lambda);
EviTerms evi_mf_terms(const GridDensity& rho1, const GridDensity& rho2, double tau, double lambda,
                      const PdeConfig& cfg);

/// Lifted EVI for the particle system against a product comparison law ν^{⊗N}.
///
/// Distances use the Dirac route 𝔇₂²(μ̂^N(τ), δ_ν) = mean_i d₂²(empirical_i(τ), ν);
/// F^N[ν^{⊗N}]/N comes from free_energy_product; F^N[μ^N(t)]/N is replaced by
/// mean_i W^N(config_i(t))/N plus the entropy of the PDE solution at t started
/// from `entropy_reference` (default: pooled histogram of ens0 on ν's grid).
/// The modulus is κ = min(3λ, 0). Always marked conditional.
CheckResult evi_lifted_check(const ParticleEnsemble& ens0, const GridDensity& nu, double s, double t, double lambda,
                             const SdeConfig& sde, const Potential& v, const Potential& h,
                             const std::optional<GridDensity>& entropy_reference = std::nullopt);

// ---------------------------------------------------------------------------
// Γ-convergence of F^N/N along product states

std::vector<CheckResult> gamma_check(const GridDensity& rho, std::span<const std::size_t> n_list, const Potential& v,
                                     const Potential& h);

// ---------------------------------------------------------------------------
// Propagation of chaos

struct ChaosPoint {
    std::size_t n = 0;
    std::size_t replicas = 0;
    double time = 0.0;
    double value = 0.0;  // c(N, t) = mean_i d₂²(empirical_i(t), S_tρ₀)
    double std_error = 0.0;
};

struct ChaosSweep {
    std::vector<ChaosPoint> points;  // N-major, then t
    std::vector<double> decay_exponents;  // per t: slope of log c vs log N
    std::vector<CheckResult> checks;
};

/// c(N, t) for every N in n_list and t in t_list; checks c(N_{k+1}, t) ≤ c(N_k, t)
/// within a 3σ band, rerunning a failing pair once with 4× replicas.
ChaosSweep chaos_sweep(const GridDensity& rho0, std::span<const std::size_t> n_list, std::size_t replicas,
                       std::span<const double> t_list, const SdeConfig& sde, const PdeConfig& pde);

/// Scaled-isometry identity for two ensembles; tolerance is relative round-off.
CheckResult isometry_check(const ParticleEnsemble& a, const ParticleEnsemble& b);

}  // namespace mfl
