#include "mfl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

namespace {

constexpr double kMassTolerance = 1e-12;

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

// ---------------------------------------------------------------------------
// GridDensity

GridDensity::GridDensity(double left, double right, std::vector<double> mass)
    : left_(left), right_(right), mass_(std::move(mass)) {
    if (!(right_ > left_)) throw ArgumentError("GridDensity: right must exceed left");
    if (mass_.size() < 2) throw ArgumentError("GridDensity: need at least 2 cells");
    for (double m : mass_) {
        if (!(m >= 0.0)) throw ArgumentError("GridDensity: negative or NaN cell mass");
    }
    if (std::abs(sum_of(mass_) - 1.0) > kMassTolerance) {
        throw ArgumentError("GridDensity: masses must sum to 1");
    }
}

GridDensity GridDensity::from_weights(double left, double right, std::vector<double> weights) {
    const double total = sum_of(weights);
    if (!(total > 0.0)) throw ArgumentError("GridDensity: weights have no mass");
    for (double& w : weights) w /= total;
    return GridDensity(left, right, std::move(weights));
}

GridDensity GridDensity::uniform(double left, double right, std::size_t cells) {
    return from_weights(left, right, std::vector<double>(cells, 1.0));
}

GridDensity GridDensity::uniform_on(double left, double right, std::size_t cells, double a, double b) {
    if (!(b > a) || a < left || b > right) throw ArgumentError("uniform_on: need left <= a < b <= right");
    const double dx = (right - left) / static_cast<double>(cells);
    std::vector<double> w(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        const double lo = left + static_cast<double>(c) * dx;
        const double hi = lo + dx;
        w[c] = std::max(0.0, std::min(hi, b) - std::max(lo, a));
    }
    return from_weights(left, right, std::move(w));
}

GridDensity GridDensity::gaussian(double left, double right, std::size_t cells, double mean, double variance) {
    if (!(variance > 0.0)) throw ArgumentError("gaussian: variance must be positive");
    const double sd = std::sqrt(variance);
    const double dx = (right - left) / static_cast<double>(cells);
    std::vector<double> w(cells);
    double prev = normal_cdf((left - mean) / sd);
    for (std::size_t c = 0; c < cells; ++c) {
        const double next = normal_cdf((left + static_cast<double>(c + 1) * dx - mean) / sd);
        w[c] = std::max(0.0, next - prev);
        prev = next;
    }
    return from_weights(left, right, std::move(w));
}

GridDensity GridDensity::point_mass(double left, double right, std::size_t cells, double x) {
    if (x < left || x > right) throw ArgumentError("point_mass: x outside the domain");
    const double dx = (right - left) / static_cast<double>(cells);
    auto c = static_cast<std::size_t>(std::floor((x - left) / dx));
    c = std::min(c, cells - 1);
    std::vector<double> w(cells, 0.0);
    w[c] = 1.0;
    return GridDensity(left, right, std::move(w));
}

double GridDensity::mean() const {
    double m = 0.0;
    for (std::size_t c = 0; c < cells(); ++c) m += center(c) * mass_[c];
    return m;
}

double GridDensity::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t c = 0; c < cells(); ++c) v += (center(c) - m) * (center(c) - m) * mass_[c];
    return v;
}

bool GridDensity::same_grid(const GridDensity& other) const {
    return left_ == other.left_ && right_ == other.right_ && cells() == other.cells();
}

// ---------------------------------------------------------------------------
// EmpiricalMeasure

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw ArgumentError("EmpiricalMeasure: no atoms");
    if (!std::is_sorted(atoms_.begin(), atoms_.end())) std::sort(atoms_.begin(), atoms_.end());
}

EmpiricalMeasure empirical_lift(std::span<const double> config) {
    if (config.empty()) throw ArgumentError("empirical_lift: empty configuration");
    return EmpiricalMeasure(std::vector<double>(config.begin(), config.end()));
}

// ---------------------------------------------------------------------------
// MetaMeasure

MetaMeasure::MetaMeasure(std::vector<double> weights, std::vector<Measure> atoms)
    : weights_(std::move(weights)), atoms_(std::move(atoms)) {
    if (weights_.empty() || weights_.size() != atoms_.size()) {
        throw ArgumentError("MetaMeasure: weights and atoms must have equal nonzero length");
    }
    for (double w : weights_) {
        if (!(w >= 0.0)) throw ArgumentError("MetaMeasure: negative weight");
    }
    if (std::abs(sum_of(weights_) - 1.0) > kMassTolerance) {
        throw ArgumentError("MetaMeasure: weights must sum to 1");
    }
}

MetaMeasure MetaMeasure::dirac(Measure atom) {
    std::vector<Measure> atoms;
    atoms.push_back(std::move(atom));
    return MetaMeasure({1.0}, std::move(atoms));
}

MetaMeasure MetaMeasure::uniform(std::vector<Measure> atoms) {
    const std::size_t m = atoms.size();
    if (m == 0) throw ArgumentError("MetaMeasure::uniform: no atoms");
    return MetaMeasure(std::vector<double>(m, 1.0 / static_cast<double>(m)), std::move(atoms));
}

// ---------------------------------------------------------------------------
// ParticleEnsemble

ParticleEnsemble::ParticleEnsemble(std::size_t n_particles, std::size_t n_replicas, std::vector<double> positions,
                                   std::uint64_t seed)
    : n_particles_(n_particles), n_replicas_(n_replicas), positions_(std::move(positions)), seed_(seed) {
    if (n_particles_ == 0 || n_replicas_ == 0) throw ArgumentError("ParticleEnsemble: N and M must be positive");
    if (positions_.size() != n_particles_ * n_replicas_) {
        throw ArgumentError("ParticleEnsemble: position array has the wrong size");
    }
}

std::span<const double> ParticleEnsemble::configuration(std::size_t replica) const {
    return std::span<const double>(positions_).subspan(replica * n_particles_, n_particles_);
}

std::span<double> ParticleEnsemble::configuration(std::size_t replica) {
    return std::span<double>(positions_).subspan(replica * n_particles_, n_particles_);
}

EmpiricalMeasure ParticleEnsemble::empirical(std::size_t replica) const {
    return empirical_lift(configuration(replica));
}

MetaMeasure ParticleEnsemble::empirical_meta() const {
    std::vector<Measure> atoms;
    atoms.reserve(n_replicas_);
    for (std::size_t r = 0; r < n_replicas_; ++r) atoms.emplace_back(empirical(r));
    return MetaMeasure::uniform(std::move(atoms));
}

ParticleEnsemble sample_product(const GridDensity& rho, std::size_t n_particles, std::size_t n_replicas,
                                std::uint64_t seed) {
    std::vector<double> cdf(rho.cells());
    std::partial_sum(rho.mass().begin(), rho.mass().end(), cdf.begin());
    const double total = cdf.back();

    std::mt19937_64 engine(seed);
    std::vector<double> pos(n_particles * n_replicas);
    for (double& x : pos) {
        const double u = rng::to_open_unit(engine()) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto c = static_cast<std::size_t>(it - cdf.begin());
        const double below = c == 0 ? 0.0 : cdf[c - 1];
        const double m = rho.mass()[c];
        const double frac = m > 0.0 ? std::clamp((u - below) / m, 0.0, 1.0) : 0.5;
        x = rho.face(c) + frac * rho.width();
    }
    return ParticleEnsemble(n_particles, n_replicas, std::move(pos), seed);
}

// ---------------------------------------------------------------------------
// DiscreteSymmetricMeasure

std::size_t checked_table_size(std::size_t k, std::size_t n) {
    if (k == 0 || n == 0) throw ArgumentError("discrete measure: need k >= 1 and n >= 1");
    std::size_t size = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (size > DiscreteSymmetricMeasure::kMaxEntries / k) {
            throw ArgumentError("discrete measure: k^n exceeds the 10^7 table cap");
        }
        size *= k;
    }
    return size;
}

DiscreteSymmetricMeasure::DiscreteSymmetricMeasure(std::vector<double> sites, std::size_t n,
                                                   std::vector<double> table)
    : sites_(std::move(sites)), n_(n), table_(std::move(table)) {
    const std::size_t size = checked_table_size(sites_.size(), n_);
    if (table_.size() != size) throw ArgumentError("discrete measure: table size must be k^n");
    {
        auto sorted = sites_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ArgumentError("discrete measure: sites must be distinct");
        }
    }
    for (double p : table_) {
        if (!(p >= 0.0)) throw ArgumentError("discrete measure: negative table entry");
    }
    if (std::abs(sum_of(table_) - 1.0) > kMassTolerance) throw ArgumentError("discrete measure: mass must be 1");

    // Adjacent transpositions generate S_n.
    for (std::size_t idx = 0; idx < size; ++idx) {
        auto tuple = tuple_of(idx);
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            std::swap(tuple[i], tuple[i + 1]);
            if (std::abs(table_[index_of(tuple)] - table_[idx]) > kMassTolerance) {
                throw ArgumentError("discrete measure: table is not permutation symmetric");
            }
            std::swap(tuple[i], tuple[i + 1]);
        }
    }
}

std::size_t DiscreteSymmetricMeasure::index_of(std::span<const std::size_t> tuple) const {
    std::size_t idx = 0;
    for (std::size_t s : tuple) idx = idx * k() + s;
    return idx;
}

std::vector<std::size_t> DiscreteSymmetricMeasure::tuple_of(std::size_t index) const {
    std::vector<std::size_t> tuple(n_);
    for (std::size_t i = n_; i-- > 0;) {
        tuple[i] = index % k();
        index /= k();
    }
    return tuple;
}

double DiscreteSymmetricMeasure::at(std::span<const std::size_t> tuple) const { return table_[index_of(tuple)]; }

DiscreteSymmetricMeasure DiscreteSymmetricMeasure::product(std::vector<double> sites, std::span<const double> probs,
                                                           std::size_t n) {
    const double w[] = {1.0};
    return mixture(std::move(sites), w, {std::vector<double>(probs.begin(), probs.end())}, n);
}

DiscreteSymmetricMeasure DiscreteSymmetricMeasure::mixture(std::vector<double> sites, std::span<const double> weights,
                                                           const std::vector<std::vector<double>>& components,
                                                           std::size_t n) {
    const std::size_t k = sites.size();
    if (weights.size() != components.size() || weights.empty()) {
        throw ArgumentError("mixture: weights and components must match");
    }
    const std::size_t size = checked_table_size(k, n);
    std::vector<double> table(size, 0.0);
    for (std::size_t w = 0; w < weights.size(); ++w) {
        const auto& p = components[w];
        if (p.size() != k) throw ArgumentError("mixture: component length must equal the number of sites");
        for (std::size_t idx = 0; idx < size; ++idx) {
            double prob = weights[w];
            std::size_t rest = idx;
            for (std::size_t i = 0; i < n; ++i) {
                prob *= p[rest % k];
                rest /= k;
            }
            table[idx] += prob;
        }
    }
    return DiscreteSymmetricMeasure(std::move(sites), n, std::move(table));
}

DiscreteSymmetricMeasure DiscreteSymmetricMeasure::uniform(std::vector<double> sites, std::size_t n) {
    const std::vector<double> p(sites.size(), 1.0 / static_cast<double>(sites.size()));
    return product(std::move(sites), p, n);
}

DiscreteSymmetricMeasure marginal(const DiscreteSymmetricMeasure& m, std::size_t n) {
    if (n == 0 || n > m.n()) throw ArgumentError("marginal: need 1 <= n <= m.n");
    const std::size_t out_size = checked_table_size(m.k(), n);
    const std::size_t tail = m.table().size() / out_size;
    std::vector<double> out(out_size, 0.0);
    for (std::size_t i = 0; i < out_size; ++i) {
        for (std::size_t j = 0; j < tail; ++j) out[i] += m.table()[i * tail + j];
    }
    return DiscreteSymmetricMeasure(std::vector<double>(m.sites().begin(), m.sites().end()), n, std::move(out));
}

MetaMeasure discrete_empirical_pushforward(const DiscreteSymmetricMeasure& m) {
    // Key: sorted site-index multiset.
    std::map<std::vector<std::size_t>, double> groups;
    for (std::size_t idx = 0; idx < m.table().size(); ++idx) {
        const double p = m.table()[idx];
        if (p == 0.0) continue;
        auto key = m.tuple_of(idx);
        std::sort(key.begin(), key.end());
        groups[key] += p;
    }
    std::vector<double> weights;
    std::vector<Measure> atoms;
    double total = 0.0;
    for (const auto& [key, p] : groups) total += p;
    for (const auto& [key, p] : groups) {
        std::vector<double> pts;
        pts.reserve(key.size());
        for (std::size_t s : key) pts.push_back(m.sites()[s]);
        weights.push_back(p / total);
        atoms.emplace_back(EmpiricalMeasure(std::move(pts)));
    }
    return MetaMeasure(std::move(weights), std::move(atoms));
}

DiscreteSymmetricMeasure tensor_lift(const MetaMeasure& x, std::size_t n, std::span<const double> sites) {
    const std::size_t k = sites.size();
    std::vector<std::vector<double>> components;
    components.reserve(x.size());
    for (const auto& atom : x.atoms()) {
        const auto* emp = std::get_if<EmpiricalMeasure>(&atom);
        if (emp == nullptr) throw ArgumentError("tensor_lift: atoms must be finitely supported empirical measures");
        std::vector<double> p(k, 0.0);
        const double w = 1.0 / static_cast<double>(emp->size());
        for (double a : emp->atoms()) {
            auto it = std::find(sites.begin(), sites.end(), a);
            if (it == sites.end()) throw ArgumentError("tensor_lift: atom outside the common site set");
            p[static_cast<std::size_t>(it - sites.begin())] += w;
        }
        components.push_back(std::move(p));
    }
    return DiscreteSymmetricMeasure::mixture(std::vector<double>(sites.begin(), sites.end()), x.weights(),
                                             components, n);
}

DiscreteSymmetricMeasure tensor_lift(const MetaMeasure& x, std::size_t n) {
    std::vector<double> sites;
    for (const auto& atom : x.atoms()) {
        const auto* emp = std::get_if<EmpiricalMeasure>(&atom);
        if (emp == nullptr) throw ArgumentError("tensor_lift: atoms must be finitely supported empirical measures");
        sites.insert(sites.end(), emp->atoms().begin(), emp->atoms().end());
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return tensor_lift(x, n, sites);
}

}  // namespace mfl
