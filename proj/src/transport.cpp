#include "mfl/transport.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/errors.hpp"
#include "mfl/hungarian.hpp"

namespace mfl {

namespace {

// Quantile function on [u0, u1] is affine from x0 to x1.
struct QuantileSegment {
    double u0, u1, x0, x1;

    double at(double u) const {
        if (u1 <= u0) return x0;
        return x0 + (x1 - x0) * (u - u0) / (u1 - u0);
    }
};

std::vector<QuantileSegment> quantile_segments(const GridDensity& rho) {
    std::vector<QuantileSegment> segs;
    double total = 0.0;
    for (double m : rho.mass()) total += m;
    double cum = 0.0;
    for (std::size_t c = 0; c < rho.cells(); ++c) {
        const double m = rho.mass()[c];
        if (m <= 0.0) continue;
        const double u0 = cum / total;
        cum += m;
        segs.push_back({u0, cum / total, rho.face(c), rho.face(c + 1)});
    }
    segs.back().u1 = 1.0;
    return segs;
}

std::vector<QuantileSegment> quantile_segments(const EmpiricalMeasure& mu) {
    std::vector<QuantileSegment> segs;
    const auto n = static_cast<double>(mu.size());
    const auto atoms = mu.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        segs.push_back({static_cast<double>(k) / n, static_cast<double>(k + 1) / n, atoms[k], atoms[k]});
    }
    segs.back().u1 = 1.0;
    return segs;
}

std::vector<QuantileSegment> quantile_segments(const Measure& m) {
    return std::visit([](const auto& x) { return quantile_segments(x); }, m);
}

// ∫_0^1 (Qa − Qb)² du with both quantiles piecewise affine: exact Simpson on
// each merged interval.
double quantile_l2_squared(const std::vector<QuantileSegment>& a, const std::vector<QuantileSegment>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    double u = 0.0;
    double total = 0.0;
    while (i < a.size() && j < b.size()) {
        const double next = std::min(a[i].u1, b[j].u1);
        if (next > u) {
            const double d0 = a[i].at(u) - b[j].at(u);
            const double d1 = a[i].at(next) - b[j].at(next);
            total += (next - u) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
            u = next;
        }
        if (a[i].u1 <= next) ++i;
        if (j < b.size() && b[j].u1 <= next) ++j;
    }
    return total;
}

double sorted_mean_square(std::span<const double> xs, std::span<const double> ys) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - ys[i]) * (xs[i] - ys[i]);
    return s / static_cast<double>(xs.size());
}

const EmpiricalMeasure* equal_size_empirical(const Measure& a, const Measure& b) {
    const auto* ea = std::get_if<EmpiricalMeasure>(&a);
    const auto* eb = std::get_if<EmpiricalMeasure>(&b);
    if (ea != nullptr && eb != nullptr && ea->size() == eb->size()) return eb;
    return nullptr;
}

}  // namespace

namespace detail {
double w2_squared_general(const Measure& a, const Measure& b) {
    return std::max(0.0, quantile_l2_squared(quantile_segments(a), quantile_segments(b)));
}
}  // namespace detail

double w2_squared(const Measure& a, const Measure& b) {
    // Equal-size empirical measures: the sorted matching is the monotone coupling.
    if (const auto* eb = equal_size_empirical(a, b)) {
        return sorted_mean_square(std::get<EmpiricalMeasure>(a).atoms(), eb->atoms());
    }
    return detail::w2_squared_general(a, b);
}

double w2_quantile(const Measure& a, const Measure& b) { return std::sqrt(w2_squared(a, b)); }

double w2_assignment(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("w2_assignment: configurations differ in length");
    if (x.empty()) throw ArgumentError("w2_assignment: empty configuration");
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    return std::sqrt(sorted_mean_square(xs, ys));
}

double w2_assignment_hungarian(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("w2_assignment: configurations differ in length");
    if (x.empty()) throw ArgumentError("w2_assignment: empty configuration");
    const std::size_t n = x.size();
    DenseMatrix cost(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cost(i, j) = (x[i] - y[j]) * (x[i] - y[j]);
    }
    const auto col = solve_assignment(cost);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost(i, col[i]);
    return std::sqrt(s / static_cast<double>(n));
}

NestedDistance nested_d2(const MetaMeasure& x, const MetaMeasure& y) {
    if (x.size() > kMaxMetaAtoms || y.size() > kMaxMetaAtoms) {
        throw ArgumentError("nested_d2: meta-measures are capped at 2048 atoms");
    }
    std::vector<std::vector<QuantileSegment>> qx, qy;
    qx.reserve(x.size());
    qy.reserve(y.size());
    for (const auto& a : x.atoms()) qx.push_back(quantile_segments(a));
    for (const auto& b : y.atoms()) qy.push_back(quantile_segments(b));

    NestedDistance out;
    out.ground_cost = DenseMatrix(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (equal_size_empirical(x.atoms()[i], y.atoms()[j]) != nullptr) {
                out.ground_cost(i, j) = sorted_mean_square(std::get<EmpiricalMeasure>(x.atoms()[i]).atoms(),
                                                           std::get<EmpiricalMeasure>(y.atoms()[j]).atoms());
            } else {
                out.ground_cost(i, j) = std::max(0.0, quantile_l2_squared(qx[i], qy[j]));
            }
        }
    }
    out.plan = solve_transport(x.weights(), y.weights(), out.ground_cost);
    out.distance = std::sqrt(std::max(0.0, out.plan.cost));
    return out;
}

IsometryGap isometry_gap(const ParticleEnsemble& a, const ParticleEnsemble& b) {
    if (a.n_particles() != b.n_particles()) throw ArgumentError("isometry_gap: particle counts differ");
    if (a.n_replicas() != b.n_replicas()) throw ArgumentError("isometry_gap: replica counts differ");
    const std::size_t m = a.n_replicas();

    // Ω^N side: per-configuration symmetrized squared distance, then an
    // optimal matching of replicas.
    DenseMatrix cost(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> xs(a.configuration(i).begin(), a.configuration(i).end());
            std::vector<double> ys(b.configuration(j).begin(), b.configuration(j).end());
            std::sort(xs.begin(), xs.end());
            std::sort(ys.begin(), ys.end());
            cost(i, j) = sorted_mean_square(xs, ys);
        }
    }
    const auto col = solve_assignment(cost);
    double lhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) lhs += cost(i, col[i]);
    lhs /= static_cast<double>(m);

    const auto nested = nested_d2(a.empirical_meta(), b.empirical_meta());
    IsometryGap out;
    out.lhs = lhs;
    out.rhs = nested.plan.cost;
    out.gap = out.lhs - out.rhs;
    return out;
}

}  // namespace mfl
