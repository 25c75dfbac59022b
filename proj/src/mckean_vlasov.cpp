#include "mfl/mckean_vlasov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"

namespace mfl {

namespace {

// Bernoulli function z / (e^z − 1).
double bernoulli(double z) {
    if (std::abs(z) < 1e-6) return 1.0 - 0.5 * z + z * z / 12.0;
    return z / std::expm1(z);
}

double max_abs_gradient(const Potential& p, double lo, double hi) {
    constexpr int kPoints = 2001;
    double m = 0.0;
    for (int k = 0; k < kPoints; ++k) m = std::max(m, std::abs(p.gradient(lo + (hi - lo) * k / (kPoints - 1))));
    return m;
}

// Φ_c = V(x_c) + Σ_d H(x_c − x_d) m_d.
std::vector<double> cell_potential(const GridDensity& rho, const Potential& v, const Potential& h) {
    const std::size_t cells = rho.cells();
    std::vector<double> phi(cells);
    for (std::size_t c = 0; c < cells; ++c) phi[c] = v(rho.center(c));
    if (h.is_zero()) return phi;
    const auto mass = rho.mass();
    if (h.is_quadratic()) {
        // Σ_d a(x − y_d)²/2 m_d = a(x² − 2x E y + E y²)/2
        double m1 = 0.0;
        double m2 = 0.0;
        for (std::size_t d = 0; d < cells; ++d) {
            m1 += rho.center(d) * mass[d];
            m2 += rho.center(d) * rho.center(d) * mass[d];
        }
        for (std::size_t c = 0; c < cells; ++c) {
            const double x = rho.center(c);
            phi[c] += 0.5 * h.coefficient() * (x * x - 2.0 * x * m1 + m2);
        }
        return phi;
    }
    for (std::size_t c = 0; c < cells; ++c) {
        double s = 0.0;
        for (std::size_t d = 0; d < cells; ++d) s += h(rho.center(c) - rho.center(d)) * mass[d];
        phi[c] += s;
    }
    return phi;
}

std::size_t step_count(double t_end, double dt) {
    if (t_end <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

double PdeConfig::max_stable_dt() const {
    const double dx = grid.width();
    const double span = grid.right - grid.left;
    const double drift = max_abs_gradient(v, grid.left, grid.right) + (h.is_zero() ? 0.0 : max_abs_gradient(h, -span, span));
    return 0.4 * dx * dx / (2.0 + dx * drift);
}

void PdeConfig::validate() const {
    if (grid.cells < 2 || !(grid.right > grid.left)) throw ArgumentError("PdeConfig: invalid grid");
    if (t_end < 0.0) throw ArgumentError("PdeConfig: t_end must be nonnegative");
    if (dt < 0.0) throw ArgumentError("PdeConfig: dt must be nonnegative");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
        throw ArgumentError("PdeConfig: snapshot times must be sorted");
    }
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_end + 1e-12) throw ArgumentError("PdeConfig: snapshot time outside [0, t_end]");
    }
    const double bound = max_stable_dt();
    if (dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "PdeConfig: dt = " << dt << " violates the CFL bound " << bound;
        throw ConfigError(msg.str());
    }
}

GridDensity semigroup_step(const GridDensity& rho, const PdeConfig& cfg) {
    const std::size_t cells = rho.cells();
    if (cells != cfg.grid.cells || rho.left() != cfg.grid.left || rho.right() != cfg.grid.right) {
        throw ArgumentError("semigroup_step: density is not on the configured grid");
    }
    const double dt = cfg.effective_dt();
    const double dx = rho.width();
    const auto mass = rho.mass();
    const auto phi = cell_potential(rho, cfg.v, cfg.h);

    // flux[f] through the face between cells f−1 and f; boundary faces stay 0.
    std::vector<double> flux(cells + 1, 0.0);
    for (std::size_t f = 1; f < cells; ++f) {
        const double z = phi[f - 1] - phi[f];  // cell Péclet number of the drift −Φ'
        const double rho_l = mass[f - 1] / dx;
        const double rho_r = mass[f] / dx;
        flux[f] = (bernoulli(-z) * rho_l - bernoulli(z) * rho_r) / dx;
    }

    std::vector<double> next(cells);
    double negative = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        next[c] = mass[c] - dt * (flux[c + 1] - flux[c]);
        if (next[c] < 0.0) negative += -next[c];
    }
    if (negative > 0.0) {
        if (negative >= 1e-12) {
            std::ostringstream msg;
            msg << "semigroup_step: negative mass " << negative << " exceeds 1e-12 (unstable step)";
            throw NumericalError(msg.str());
        }
        for (double& m : next) m = std::max(m, 0.0);
        return GridDensity::from_weights(rho.left(), rho.right(), std::move(next));
    }
    return GridDensity(rho.left(), rho.right(), std::move(next));
}

std::vector<DensitySnapshot> solve(const GridDensity& rho0, const PdeConfig& cfg, const StepObserver& observer) {
    cfg.validate();
    const double dt_max = cfg.effective_dt();
    const std::size_t steps = step_count(cfg.t_end, dt_max);
    PdeConfig run = cfg;
    run.dt = steps == 0 ? dt_max : cfg.t_end / static_cast<double>(steps);

    std::vector<double> wanted = cfg.snapshot_times;
    if (wanted.empty()) wanted = cfg.t_end > 0.0 ? std::vector<double>{0.0, cfg.t_end} : std::vector<double>{0.0};
    std::vector<std::size_t> at_step;
    for (double t : wanted) {
        const auto k = steps == 0 ? std::size_t{0} : static_cast<std::size_t>(std::llround(t / run.dt));
        at_step.push_back(std::min(k, steps));
    }

    std::vector<DensitySnapshot> snaps;
    std::size_t next = 0;
    GridDensity current = rho0;
    for (std::size_t k = 0;; ++k) {
        const double time = static_cast<double>(k) * run.dt;
        if (observer) observer(time, current);
        while (next < at_step.size() && at_step[next] == k) {
            snaps.push_back({time, current});
            ++next;
        }
        if (k == steps || (next == at_step.size() && !observer)) break;
        current = semigroup_step(current, run);
    }
    return snaps;
}

Moments ou_oracle(double m0, double var0, double t) {
    if (!(var0 > 0.0)) throw ArgumentError("ou_oracle: variance must be positive");
    return {m0 * std::exp(-t), 1.0 + (var0 - 1.0) * std::exp(-2.0 * t)};
}

double gaussian_w2_squared(double m1, double v1, double m2, double v2) {
    const double ds = std::sqrt(v1) - std::sqrt(v2);
    return (m1 - m2) * (m1 - m2) + ds * ds;
}

double gaussian_free_energy_ou(double m, double v, double a) {
    return 0.5 * a * (m * m + v) - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * v);
}

void write_snapshots_csv(std::ostream& os, const std::vector<DensitySnapshot>& snaps) {
    os << "time,cell_center,mass,density_value\n";
    for (const auto& s : snaps) {
        for (std::size_t c = 0; c < s.rho.cells(); ++c) {
            os << csv::real(s.time) << ',' << csv::real(s.rho.center(c)) << ',' << csv::real(s.rho.mass()[c]) << ','
               << csv::real(s.rho.density(c)) << '\n';
        }
    }
}

}  // namespace mfl
