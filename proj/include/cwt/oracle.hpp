#ifndef CWT_ORACLE_HPP
#define CWT_ORACLE_HPP

#include <complex>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwt/bohmian.hpp"
#include "cwt/closed_form.hpp"
#include "cwt/core_model.hpp"

// Brute-force verification side of the project. Everything in here
// differentiates and fits numerically, on purpose: these routines never
// touch the analytic-derivative paths they are used to check.
namespace cwt::oracle {

class convergence_failure : public std::runtime_error {
public:
    explicit convergence_failure(const std::string& what)
        : std::runtime_error(what) {}
};

/// Uniform evaluation grid, x_max > x_min >= 0, at least 16 points.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 5.0;
    int n_points = 256;

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double point(int i) const { return x_min + spacing() * i; }
    void validate() const;
};

struct ResidualReport {
    double max_abs = 0.0;
    double location = 0.0;
    std::vector<std::pair<double, double>> per_point;  ///< (x, |residual|)
    bool spacing_warning = false;  ///< stencil too coarse for the 1e-8 target
};

using FieldFn = std::function<WaveField(double)>;

/// Residual of the stationary coupled equation for one waveguide,
///   E psi_i - [ -(hbar^2/2m) psi_i'' + V0 psi_i + hbar J0 (psi_j - psi_i) ],
/// with psi'' from a Richardson-extrapolated 5-point stencil on grid
/// values. Interior points only. The FieldFn overload lets tests feed a
/// corrupted field to confirm the detector actually fires.
ResidualReport stationary_residual(const PhysicalConfig& config,
                                   const GridSpec& grid, Waveguide waveguide);
ResidualReport stationary_residual(const PhysicalConfig& config,
                                   const GridSpec& grid, Waveguide waveguide,
                                   const FieldFn& field);

/// Richardson-extrapolated second derivative of an arbitrary complex
/// function (5-point base stencil; `levels` halvings, order 4 + 2*levels).
std::complex<double> second_derivative(
    const std::function<std::complex<double>(double)>& f, double x, double h,
    int levels = 1);

/// Quadratic coefficient of rho_a_norm extracted by least-squares fits of
/// a x^2 + b x^3 over shrinking windows w in {1e-2, 1e-3, 1e-4}; returns a
/// from the smallest window pair that agrees to 1e-6 relative.
/// Throws convergence_failure when no pair stabilizes.
double numeric_quadratic_coefficient(const PhysicalConfig& config);

/// Centred-difference phase-gradient velocity (hbar/m) dS/dx, computed
/// from Im log(psi(x+h)/psi(x-h)) with one Richardson step.
double numeric_bohm_velocity(const PhysicalConfig& config, double x,
                             Waveguide waveguide);

/// Quantum potential from a finite-difference second derivative of |psi|.
double numeric_quantum_potential(const PhysicalConfig& config, double x,
                                 Waveguide waveguide);

/// d/dx (rho v) by central differences of the probability flux.
double numeric_flux_divergence(const PhysicalConfig& config, double x,
                               Waveguide waveguide);

struct ConvergenceEntry {
    int level = 0;
    double value = 0.0;
    double error_vs_finest = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    bool monotone = false;       ///< errors strictly decrease towards finest
    double observed_order = 0.0; ///< mean log2 ratio of successive errors; NaN if degenerate
};

/// Evaluates a quantity at refinement levels 0..levels-1 (finer with
/// increasing level) and reports errors against the finest level.
/// Non-monotone decay is flagged in the report, never thrown.
ConvergenceReport convergence_check(
    const std::function<double(int)>& value_at_level, int levels);

/// One frozen reference value: a quantity name, the config it was
/// computed for, the oracle value and the tolerance it carries.
struct Fixture {
    std::string quantity;
    PhysicalConfig config;
    double extra = 0.0;  ///< x, epsilon or window, depending on the quantity
    double value = 0.0;
    double tolerance = 0.0;
};

/// Deterministic list of oracle-computed reference values.
std::vector<Fixture> fixtures();

/// Writes the fixture list as flat key=value records, one per line.
void write_fixtures(std::ostream& out);

}  // namespace cwt::oracle

#endif  // CWT_ORACLE_HPP
