#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace mfl {

/// One-dimensional potential with exact first and second derivatives.
///
/// Built-in kinds are quadratic a·x²/2 (λ = a) and double well a·(1 − x²)²
/// (λ = inf of a·(12x² − 4) over the scan interval, found by scanning at
/// construction). Custom potentials supply their own callables and λ.
/// `scan_radius` is the half-width of the interval [−R, R] used for
/// boundedness, symmetry and derivative-consistency scans.
class Potential {
public:
    enum class Kind { Quadratic, DoubleWell, Custom };

    static Potential quadratic(double a, double scan_radius = 8.0);
    static Potential double_well(double a, double scan_radius = 3.0);
    static Potential zero(double scan_radius = 8.0) { return quadratic(0.0, scan_radius); }
    static Potential custom(std::string name, std::function<double(double)> value,
                            std::function<double(double)> gradient, std::function<double(double)> hessian,
                            double lambda_claimed, double scan_radius);

    /// Parses `zero`, `quadratic:a=<real>`, `doublewell:a=<real>`.
    static Potential parse(std::string_view spec, double scan_radius);

    Kind kind() const { return kind_; }
    double coefficient() const { return a_; }
    double lambda() const { return lambda_; }
    double scan_radius() const { return scan_radius_; }
    const std::string& name() const { return name_; }
    /// Canonical spec string (round-trips through parse for built-in kinds).
    std::string spec() const;

    bool is_zero() const { return kind_ == Kind::Quadratic && a_ == 0.0; }
    /// Quadratic kinds have linear gradients, so convolutions reduce to moments.
    bool is_quadratic() const { return kind_ == Kind::Quadratic; }

    double operator()(double x) const;
    double gradient(double x) const;
    double hessian(double x) const;

private:
    Potential() = default;

    Kind kind_ = Kind::Quadratic;
    double a_ = 0.0;
    double lambda_ = 0.0;
    double scan_radius_ = 8.0;
    std::string name_;
    std::shared_ptr<const std::function<double(double)>> value_, gradient_, hessian_;
};

/// Scan of a potential on [−R, R]: lower bound, derivative consistency and
/// symmetry.
struct PotentialScan {
    double min_value = 0.0;
    double max_gradient_error = 0.0;  // relative, central differences vs analytic
    double max_hessian_error = 0.0;
    double max_asymmetry = 0.0;  // max |f(x) − f(−x)|
    double max_abs_gradient = 0.0;
    double max_abs_hessian = 0.0;
};

PotentialScan scan_potential(const Potential& p, std::size_t points = 2001);

/// True iff H(x) = H(−x) on the scan grid up to `tol` (relative).
bool is_symmetric(const Potential& h, double tol = 1e-12);

}  // namespace mfl
