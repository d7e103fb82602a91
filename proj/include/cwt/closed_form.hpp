#ifndef CWT_CLOSED_FORM_HPP
#define CWT_CLOSED_FORM_HPP

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cwt/core_model.hpp"

namespace cwt {

/// Raised when both populations have decayed below the smallest
/// representable magnitude, so the normalized population would be 0/0.
class tail_underflow_error : public std::runtime_error {
public:
    explicit tail_underflow_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// Stationary fields and their analytic x-derivatives at one point.
/// psi_m(0) = c0 and psi_a(0) = 0 by construction.
struct WaveField {
    std::complex<double> psi_m;
    std::complex<double> psi_a;
    std::complex<double> dpsi_m_dx;
    std::complex<double> dpsi_a_dx;
    std::complex<double> d2psi_m_dx2;
    std::complex<double> d2psi_a_dx2;
    double x = 0.0;
};

/// psi_m = (c0/2)(e^{ik+x} + e^{ik-x}), psi_a = (c0/2)(e^{ik+x} - e^{ik-x}),
/// with derivatives evaluated analytically from the wavenumbers.
/// Throws std::domain_error for x < 0 (solution holds past the step only).
WaveField eval_fields(const PhysicalConfig& config, double x);

/// Auxiliary-waveguide population at one point: raw |psi_a|^2 and the
/// normalized fraction |psi_a|^2 / (|psi_a|^2 + |psi_m|^2) in [0, 1].
struct PopulationSample {
    double x = 0.0;
    double rho_a_raw = 0.0;
    double rho_a_norm = 0.0;
};

/// Throws tail_underflow_error when the denominator underflows to zero.
PopulationSample population(const PhysicalConfig& config, double x);

/// Coefficient C of x^2 in the small-x expansion of the normalized
/// population:
///   |Delta| <= hbar*J0 : C = m*J0/hbar                      (plateau)
///   |Delta| >  hbar*J0 : C = 2m*J0^2 / (sqrt|Delta+hbar*J0| +
///                                        sqrt|Delta-hbar*J0|)^2
/// Both branches agree at the boundary.
double rho_a_coefficient(const PhysicalConfig& config);

/// Speed inferred from the quadratic population growth, v = J0 / sqrt(C).
/// Equals sqrt(hbar*J0/m) on the plateau and
/// (sqrt|Delta+hbar*J0| + sqrt|Delta-hbar*J0|) / sqrt(2m) outside it.
double semiclassical_speed(const PhysicalConfig& config);

/// Least-squares fit of rho_a_norm = (J0 x / v)^2 over samples with
/// 0 < x <= window (monomial basis {x^2}); returns the fitted v.
/// Throws std::invalid_argument for fewer than 3 usable samples or
/// negative populations, std::domain_error for an all-zero degenerate fit.
double fit_speed_from_samples(std::span<const PopulationSample> samples,
                              double coupling, double window);

/// Default fit window 0.05 * hbar / sqrt(2 m hbar J0); keeps the
/// higher-order contamination of the quadratic fit small.
double default_fit_window(const PhysicalConfig& config);

/// Number of uniform samples used by default when generating fit input.
inline constexpr int default_fit_samples = 50;

/// The small-x population coefficient computed three independent ways.
struct CoefficientReport {
    double closed_form = 0.0;  ///< regime branch formula
    double bohmian = 0.0;      ///< continuity-equation reconstruction
    double oracle = 0.0;       ///< numeric window fit
    Regime regime = Regime::MixedTransmissionEvanescent;
};

}  // namespace cwt

#endif  // CWT_CLOSED_FORM_HPP
