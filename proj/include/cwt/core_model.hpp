#ifndef CWT_CORE_MODEL_HPP
#define CWT_CORE_MODEL_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace cwt {

/// Model parameters of the two evanescently coupled waveguides.
///
/// Defaults give the dimensionless unit system hbar = m = J0 = 1,
/// V0 = 0, c0 = 1, in which the detuning equals energy + 1.
struct PhysicalConfig {
    double hbar = 1.0;            ///< reduced Planck constant
    double mass = 1.0;            ///< effective photon mass m
    double coupling = 1.0;        ///< inter-waveguide coupling rate J0 (> 0)
    double step_potential = 0.0;  ///< step height V0
    double energy = 0.0;          ///< total energy E of the stationary state
    std::complex<double> amplitude{1.0, 0.0};  ///< incident amplitude c0 (!= 0)

    /// Throws std::invalid_argument when an invariant is violated
    /// (hbar, mass, coupling must be positive and finite; amplitude
    /// nonzero; energy, step_potential and the derived detuning finite).
    void validate() const;
};

/// Detuning Delta = E - V0 + hbar*J0, the control parameter of the system.
double detuning(const PhysicalConfig& config);

/// Dynamical regime selected by the detuning.
enum class Regime {
    TwoTransmission,              ///< Delta >  hbar*J0: both modes propagate
    MixedTransmissionEvanescent,  ///< |Delta| <= hbar*J0 (upper boundary closed)
    TwoEvanescent,                ///< Delta <= -hbar*J0: both modes decay
};

std::string to_string(Regime regime);

/// Partition of the detuning axis. Boundary |Delta| = hbar*J0 maps to the
/// adjacent regime whose formulas stay continuous: Delta = +hbar*J0 is
/// Mixed, Delta = -hbar*J0 is TwoEvanescent.
/// Throws std::invalid_argument for hbar_J0 <= 0 and std::domain_error for
/// non-finite delta.
Regime classify_regime(double delta, double hbar_J0);

/// Wavenumbers of the symmetric (k_plus) and antisymmetric (k_minus)
/// superposition modes. Each is purely real or purely imaginary with
/// Im >= 0 (decaying evanescent branch).
struct WaveNumbers {
    std::complex<double> k_plus;
    std::complex<double> k_minus;
};

/// k_pm = sqrt(2m(Delta -/+ hbar*J0)/hbar^2); a negative radicand yields
/// +i*sqrt(|radicand|).
WaveNumbers wavenumbers(const PhysicalConfig& config);

/// Effective mass from a resonance energy: m = E_z / c_medium^2.
/// Throws std::domain_error on non-positive input.
double mass_from_resonance(double resonance_energy, double medium_speed);

}  // namespace cwt

#endif  // CWT_CORE_MODEL_HPP
