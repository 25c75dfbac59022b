#include "mfl/particles.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

namespace {

constexpr int kScanPoints = 2001;

double max_abs_hessian(const Potential& p, double lo, double hi) {
    double m = 0.0;
    for (int k = 0; k < kScanPoints; ++k) {
        const double x = lo + (hi - lo) * k / (kScanPoints - 1);
        m = std::max(m, std::abs(p.hessian(x)));
    }
    return m;
}

std::size_t step_count(double t_end, double dt) {
    if (t_end <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

double SdeConfig::drift_lipschitz() const {
    const double lo = domain.bounded ? domain.left : -v.scan_radius();
    const double hi = domain.bounded ? domain.right : v.scan_radius();
    const double span = domain.bounded ? hi - lo : h.scan_radius();
    return max_abs_hessian(v, lo, hi) + (h.is_zero() ? 0.0 : max_abs_hessian(h, -span, span));
}

void SdeConfig::validate() const {
    if (!(dt > 0.0)) throw ArgumentError("SdeConfig: dt must be positive");
    if (t_end < 0.0) throw ArgumentError("SdeConfig: t_end must be nonnegative");
    if (t_end > 0.0 && dt > t_end) throw ArgumentError("SdeConfig: dt exceeds t_end");
    if (domain.bounded && !(domain.right > domain.left)) throw ArgumentError("SdeConfig: empty domain");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
        throw ArgumentError("SdeConfig: snapshot times must be sorted");
    }
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_end + 1e-12) throw ArgumentError("SdeConfig: snapshot time outside [0, t_end]");
    }
    const double lip = drift_lipschitz();
    if (dt * lip >= 0.5) {
        std::ostringstream msg;
        msg << "SdeConfig: dt * Lipschitz(drift) = " << dt * lip << " >= 0.5";
        throw NumericalError(msg.str());
    }
}

double fold_into(double x, double left, double right) {
    const double width = right - left;
    if (x >= left && x <= right) return x;
    // Reflection is periodic with period 2·width.
    double y = std::fmod(x - left, 2.0 * width);
    if (y < 0.0) y += 2.0 * width;
    if (y > width) y = 2.0 * width - y;
    return std::clamp(left + y, left, right);
}

ParticleEnsemble step(const ParticleEnsemble& ensemble, const SdeConfig& cfg, std::uint64_t step_index,
                      std::span<const std::uint32_t> labels) {
    const std::size_t n = ensemble.n_particles();
    const std::size_t m = ensemble.n_replicas();
    if (!labels.empty() && labels.size() != n) throw ArgumentError("step: one noise label per particle required");
    const double inv_n = 1.0 / static_cast<double>(n);
    const double noise_scale = std::sqrt(2.0 * cfg.dt);

    std::vector<double> out(ensemble.positions().begin(), ensemble.positions().end());
    std::vector<double> force(n);
    for (std::size_t r = 0; r < m; ++r) {
        const auto x = ensemble.configuration(r);
        if (cfg.h.is_zero() || n == 1) {
            for (std::size_t i = 0; i < n; ++i) force[i] = cfg.v.gradient(x[i]);
        } else if (cfg.h.is_quadratic()) {
            // (1/N) Σ_{j≠i} a(x_i − x_j) = a(x_i − mean)
            double mean = 0.0;
            for (double xi : x) mean += xi;
            mean *= inv_n;
            for (std::size_t i = 0; i < n; ++i) force[i] = cfg.v.gradient(x[i]) + cfg.h.coefficient() * (x[i] - mean);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                double pair = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) pair += cfg.h.gradient(x[i] - x[j]);
                }
                force[i] = cfg.v.gradient(x[i]) + inv_n * pair;
            }
        }

        auto y = std::span<double>(out).subspan(r * n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(force[i])) {
                std::ostringstream msg;
                msg << "step: non-finite drift at replica " << r << ", particle " << i << ", position " << x[i]
                    << ", force " << force[i];
                throw NumericalError(msg.str());
            }
            const std::uint64_t label = labels.empty() ? i : labels[i];
            const std::uint64_t stream = rng::combine(rng::combine(cfg.seed, r), label);
            double next = x[i] - force[i] * cfg.dt + noise_scale * rng::counter_normal(stream, step_index);
            if (cfg.domain.bounded) next = fold_into(next, cfg.domain.left, cfg.domain.right);
            if (!std::isfinite(next)) {
                std::ostringstream msg;
                msg << "step: position overflow at replica " << r << ", particle " << i;
                throw NumericalError(msg.str());
            }
            y[i] = next;
        }
    }
    return ParticleEnsemble(n, m, std::move(out), ensemble.seed());
}

std::vector<EnsembleSnapshot> evolve(const ParticleEnsemble& ensemble, const SdeConfig& cfg) {
    cfg.validate();
    const std::size_t steps = step_count(cfg.t_end, cfg.dt);
    SdeConfig run = cfg;
    run.dt = steps == 0 ? cfg.dt : cfg.t_end / static_cast<double>(steps);

    std::vector<double> wanted = cfg.snapshot_times;
    if (wanted.empty()) wanted = cfg.t_end > 0.0 ? std::vector<double>{0.0, cfg.t_end} : std::vector<double>{0.0};
    std::vector<std::size_t> at_step;
    for (double t : wanted) {
        const auto k = steps == 0 ? std::size_t{0} : static_cast<std::size_t>(std::llround(t / run.dt));
        at_step.push_back(std::min(k, steps));
    }

    std::vector<EnsembleSnapshot> snaps;
    std::size_t next = 0;
    ParticleEnsemble current = ensemble;
    for (std::size_t k = 0;; ++k) {
        while (next < at_step.size() && at_step[next] == k) {
            snaps.push_back({static_cast<double>(k) * run.dt, current});
            ++next;
        }
        if (k == steps || next == at_step.size()) break;
        current = step(current, run, k);
    }
    return snaps;
}

void write_snapshots_csv(std::ostream& os, const std::vector<EnsembleSnapshot>& snaps) {
    os << "time,replica,particle,position\n";
    for (const auto& s : snaps) {
        for (std::size_t r = 0; r < s.ensemble.n_replicas(); ++r) {
            const auto x = s.ensemble.configuration(r);
            for (std::size_t i = 0; i < x.size(); ++i) {
                os << csv::real(s.time) << ',' << r << ',' << i << ',' << csv::real(x[i]) << '\n';
            }
        }
    }
}

GridDensity histogram(const ParticleEnsemble& ensemble, double left, double right, std::size_t cells) {
    std::vector<double> counts(cells, 0.0);
    const double dx = (right - left) / static_cast<double>(cells);
    for (double x : ensemble.positions()) {
        if (x < left || x > right) continue;
        auto c = static_cast<std::size_t>((x - left) / dx);
        counts[std::min(c, cells - 1)] += 1.0;
    }
    return GridDensity::from_weights(left, right, std::move(counts));
}

}  // namespace mfl
