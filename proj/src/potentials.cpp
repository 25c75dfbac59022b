#include "mfl/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"

namespace mfl {

namespace {

double double_well_lambda(double a, double radius) {
    // Second derivative a(12x² − 4); scan rather than assume the minimizer.
    constexpr int kPoints = 4001;
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kPoints; ++k) {
        const double x = -radius + 2.0 * radius * k / (kPoints - 1);
        lo = std::min(lo, a * (12.0 * x * x - 4.0));
    }
    return lo;
}

double parse_coefficient(std::string_view args) {
    // args: "a=<real>"
    if (args.substr(0, 2) != "a=") throw ConfigError("potential parameters must be 'a=<real>'");
    try {
        return csv::parse_real(args.substr(2));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("potential coefficient: ") + e.what());
    }
}

}  // namespace

Potential Potential::quadratic(double a, double scan_radius) {
    Potential p;
    p.kind_ = Kind::Quadratic;
    p.a_ = a;
    p.lambda_ = a;
    p.scan_radius_ = scan_radius;
    p.name_ = a == 0.0 ? "zero" : "quadratic";
    return p;
}

Potential Potential::double_well(double a, double scan_radius) {
    if (!(a >= 0.0)) throw ArgumentError("double_well: coefficient must be nonnegative");
    Potential p;
    p.kind_ = Kind::DoubleWell;
    p.a_ = a;
    p.scan_radius_ = scan_radius;
    p.lambda_ = double_well_lambda(a, scan_radius);
    p.name_ = "doublewell";
    return p;
}

Potential Potential::custom(std::string name, std::function<double(double)> value,
                            std::function<double(double)> gradient, std::function<double(double)> hessian,
                            double lambda_claimed, double scan_radius) {
    if (!value || !gradient || !hessian) throw ArgumentError("custom potential: all three callables are required");
    Potential p;
    p.kind_ = Kind::Custom;
    p.lambda_ = lambda_claimed;
    p.scan_radius_ = scan_radius;
    p.name_ = std::move(name);
    p.value_ = std::make_shared<const std::function<double(double)>>(std::move(value));
    p.gradient_ = std::make_shared<const std::function<double(double)>>(std::move(gradient));
    p.hessian_ = std::make_shared<const std::function<double(double)>>(std::move(hessian));
    return p;
}

Potential Potential::parse(std::string_view spec, double scan_radius) {
    while (!spec.empty() && spec.front() == ' ') spec.remove_prefix(1);
    while (!spec.empty() && spec.back() == ' ') spec.remove_suffix(1);
    if (spec == "zero") return zero(scan_radius);
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("unknown potential '" + std::string(spec) + "'");
    const auto kind = spec.substr(0, colon);
    const double a = parse_coefficient(spec.substr(colon + 1));
    if (kind == "quadratic") return quadratic(a, scan_radius);
    if (kind == "doublewell") {
        if (a < 0.0) throw ConfigError("doublewell coefficient must be nonnegative");
        return double_well(a, scan_radius);
    }
    throw ConfigError("unknown potential kind '" + std::string(kind) + "'");
}

std::string Potential::spec() const {
    switch (kind_) {
        case Kind::Quadratic:
            return a_ == 0.0 ? "zero" : "quadratic:a=" + csv::real(a_);
        case Kind::DoubleWell:
            return "doublewell:a=" + csv::real(a_);
        case Kind::Custom:
            return "custom:" + name_;
    }
    return name_;
}

double Potential::operator()(double x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return 0.5 * a_ * x * x;
        case Kind::DoubleWell: {
            const double s = 1.0 - x * x;
            return a_ * s * s;
        }
        case Kind::Custom:
            return (*value_)(x);
    }
    return 0.0;
}

double Potential::gradient(double x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return a_ * x;
        case Kind::DoubleWell:
            return -4.0 * a_ * x * (1.0 - x * x);
        case Kind::Custom:
            return (*gradient_)(x);
    }
    return 0.0;
}

double Potential::hessian(double x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return a_;
        case Kind::DoubleWell:
            return a_ * (12.0 * x * x - 4.0);
        case Kind::Custom:
            return (*hessian_)(x);
    }
    return 0.0;
}

PotentialScan scan_potential(const Potential& p, std::size_t points) {
    PotentialScan s;
    s.min_value = std::numeric_limits<double>::infinity();
    const double r = p.scan_radius();
    const double h = 1e-5 * std::max(1.0, r);
    for (std::size_t k = 0; k < points; ++k) {
        const double x = -r + 2.0 * r * static_cast<double>(k) / static_cast<double>(points - 1);
        const double f = p(x);
        const double g = p.gradient(x);
        const double hh = p.hessian(x);
        s.min_value = std::min(s.min_value, f);
        s.max_abs_gradient = std::max(s.max_abs_gradient, std::abs(g));
        s.max_abs_hessian = std::max(s.max_abs_hessian, std::abs(hh));
        s.max_asymmetry = std::max(s.max_asymmetry, std::abs(f - p(-x)));

        const double g_fd = (p(x + h) - p(x - h)) / (2.0 * h);
        const double h_fd = (p.gradient(x + h) - p.gradient(x - h)) / (2.0 * h);
        s.max_gradient_error = std::max(s.max_gradient_error, std::abs(g_fd - g) / std::max(1.0, std::abs(g)));
        s.max_hessian_error = std::max(s.max_hessian_error, std::abs(h_fd - hh) / std::max(1.0, std::abs(hh)));
    }
    return s;
}

bool is_symmetric(const Potential& h, double tol) {
    if (h.kind() != Potential::Kind::Custom) return true;
    const double r = 2.0 * h.scan_radius();
    constexpr int kPoints = 2001;
    for (int k = 0; k < kPoints; ++k) {
        const double x = r * k / (kPoints - 1);
        const double a = h(x);
        const double b = h(-x);
        if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
    }
    return true;
}

}  // namespace mfl
