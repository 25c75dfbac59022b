#include "mfl/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

double w_n(std::span<const double> config, const Potential& v, const Potential& h) {
    if (config.empty()) throw ArgumentError("w_n: empty configuration");
    if (!is_symmetric(h)) throw ArgumentError("w_n: interaction potential is not symmetric");
    const std::size_t n = config.size();
    double confinement = 0.0;
    for (double x : config) confinement += v(x);
    if (h.is_zero() || n == 1) return confinement;
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) pairs += h(config[i] - config[j]);
        }
    }
    return confinement + pairs / (2.0 * static_cast<double>(n));
}

double hessian_quadratic_form(std::span<const double> config, std::span<const double> dir, const Potential& v,
                              const Potential& h) {
    if (config.size() != dir.size()) throw ArgumentError("hessian_quadratic_form: direction length mismatch");
    const std::size_t n = config.size();
    double form = 0.0;
    for (std::size_t i = 0; i < n; ++i) form += v.hessian(config[i]) * dir[i] * dir[i];
    if (h.is_zero()) return form;
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dv = dir[i] - dir[j];
            pairs += h.hessian(config[i] - config[j]) * dv * dv;
        }
    }
    return form + pairs / (2.0 * static_cast<double>(n));
}

double hessian_quadratic_form_fd(std::span<const double> config, std::span<const double> dir, const Potential& v,
                                 const Potential& h, double eps) {
    if (config.size() != dir.size()) throw ArgumentError("hessian_quadratic_form_fd: direction length mismatch");
    std::vector<double> plus(config.begin(), config.end());
    std::vector<double> minus(config.begin(), config.end());
    for (std::size_t i = 0; i < config.size(); ++i) {
        plus[i] += eps * dir[i];
        minus[i] -= eps * dir[i];
    }
    return (w_n(plus, v, h) - 2.0 * w_n(config, v, h) + w_n(minus, v, h)) / (eps * eps);
}

double convexity_modulus_estimate(const Potential& v, const Potential& h, std::size_t n, std::size_t trials,
                                  std::uint64_t seed) {
    if (trials == 0 || n == 0) throw ArgumentError("convexity_modulus_estimate: need N >= 1 and trials >= 1");
    // Pair differences must stay inside H's scan interval.
    const double radius = std::min(v.scan_radius(), 0.5 * h.scan_radius());
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> position(-radius, radius);
    std::normal_distribution<double> gauss;
    std::vector<double> config(n), dir(n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            config[i] = position(engine);
            dir[i] = gauss(engine);
            norm += dir[i] * dir[i];
        }
        norm = std::sqrt(norm);
        for (double& d : dir) d /= norm;
        best = std::min(best, hessian_quadratic_form(config, dir, v, h));
    }
    return best;
}

DoublingResult doubling_check(const Potential& h, const ScanSpec& scan) {
    if (scan.points < 2 || !(scan.hi > scan.lo)) throw ArgumentError("doubling_check: invalid scan");
    const auto at = [&](std::size_t k) {
        return scan.lo + (scan.hi - scan.lo) * static_cast<double>(k) / static_cast<double>(scan.points - 1);
    };
    // Shift so that H ≥ 0 on every argument the scan touches (x, y and x + y).
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scan.points; ++i) {
        for (std::size_t j = 0; j < scan.points; ++j) lowest = std::min(lowest, h(at(i) + at(j)));
        lowest = std::min(lowest, h(at(i)));
    }
    if (!std::isfinite(lowest)) throw NumericalError("doubling_check: H is unbounded below on the scan");

    DoublingResult out;
    out.constant = 0.0;
    for (std::size_t i = 0; i < scan.points; ++i) {
        const double hx = h(at(i)) - lowest;
        for (std::size_t j = 0; j < scan.points; ++j) {
            const double hy = h(at(j)) - lowest;
            const double hxy = h(at(i) + at(j)) - lowest;
            out.constant = std::max(out.constant, hxy / (1.0 + hx + hy));
        }
    }
    out.holds = std::isfinite(out.constant);
    return out;
}

double interaction_integral(const GridDensity& rho, const Potential& h) {
    if (h.is_zero()) return 0.0;
    const auto mass = rho.mass();
    if (h.is_quadratic()) {
        // ∬ a(x − y)²/2 = a (E x² − (E x)²) with the same midpoint nodes.
        double m1 = 0.0;
        double m2 = 0.0;
        for (std::size_t c = 0; c < rho.cells(); ++c) {
            m1 += rho.center(c) * mass[c];
            m2 += rho.center(c) * rho.center(c) * mass[c];
        }
        return h.coefficient() * (m2 - m1 * m1);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < rho.cells(); ++c) {
        if (mass[c] == 0.0) continue;
        double row = 0.0;
        for (std::size_t d = 0; d < rho.cells(); ++d) row += h(rho.center(c) - rho.center(d)) * mass[d];
        total += row * mass[c];
    }
    return total;
}

double grid_entropy(const GridDensity& rho) {
    const double dx = rho.width();
    double s = 0.0;
    for (double m : rho.mass()) {
        if (m > 0.0) s += m * std::log(m / dx);
    }
    return s;
}

namespace {
double confinement_energy(const GridDensity& rho, const Potential& v) {
    if (v.is_zero()) return 0.0;
    double e = 0.0;
    for (std::size_t c = 0; c < rho.cells(); ++c) e += v(rho.center(c)) * rho.mass()[c];
    return e;
}
}  // namespace

EnergyReport free_energy_mf(const GridDensity& rho, const Potential& v, const Potential& h) {
    EnergyReport r;
    r.confinement = confinement_energy(rho, v);
    r.interaction = 0.5 * interaction_integral(rho, h);
    r.entropy = grid_entropy(rho);
    r.total = r.confinement + r.interaction + r.entropy;
    return r;
}

double free_energy_product(const GridDensity& rho, std::size_t n, const Potential& v, const Potential& h) {
    if (n == 0) throw ArgumentError("free_energy_product: N must be positive");
    const auto nn = static_cast<double>(n);
    return confinement_energy(rho, v) + (nn - 1.0) / (2.0 * nn) * interaction_integral(rho, h) + grid_entropy(rho);
}

double free_energy_meta(const MetaMeasure& x, const Potential& v, const Potential& h) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto* rho = std::get_if<GridDensity>(&x.atoms()[i]);
        if (rho == nullptr) throw ArgumentError("free_energy_meta: entropy is undefined for empirical atoms");
        total += x.weights()[i] * free_energy_mf(*rho, v, h).total;
    }
    return total;
}

}  // namespace mfl
