#include "cwt/core_model.hpp"

#include <cmath>

namespace cwt {

void PhysicalConfig::validate() const {
    if (!(std::isfinite(hbar) && hbar > 0.0))
        throw std::invalid_argument("PhysicalConfig: hbar must be positive");
    if (!(std::isfinite(mass) && mass > 0.0))
        throw std::invalid_argument("PhysicalConfig: mass must be positive");
    if (!(std::isfinite(coupling) && coupling > 0.0))
        throw std::invalid_argument("PhysicalConfig: coupling must be positive");
    if (!(std::isfinite(step_potential)))
        throw std::invalid_argument("PhysicalConfig: step_potential must be finite");
    if (!(std::isfinite(energy)))
        throw std::invalid_argument("PhysicalConfig: energy must be finite");
    if (!(std::isfinite(amplitude.real()) && std::isfinite(amplitude.imag())) ||
        amplitude == std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("PhysicalConfig: amplitude must be finite and nonzero");
    if (!std::isfinite(energy - step_potential + hbar * coupling))
        throw std::invalid_argument("PhysicalConfig: detuning is not finite");
}

double detuning(const PhysicalConfig& config) {
    config.validate();
    return config.energy - config.step_potential + config.hbar * config.coupling;
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::TwoTransmission: return "two_transmission";
        case Regime::MixedTransmissionEvanescent: return "mixed";
        case Regime::TwoEvanescent: return "two_evanescent";
    }
    return "unknown";
}

Regime classify_regime(double delta, double hbar_J0) {
    if (!(std::isfinite(hbar_J0) && hbar_J0 > 0.0))
        throw std::invalid_argument("classify_regime: hbar_J0 must be positive");
    if (!std::isfinite(delta))
        throw std::domain_error("classify_regime: delta is not finite");
    if (delta > hbar_J0) return Regime::TwoTransmission;
    if (delta <= -hbar_J0) return Regime::TwoEvanescent;
    return Regime::MixedTransmissionEvanescent;
}

namespace {

// Principal branch with Im >= 0: real sqrt for a non-negative radicand,
// +i sqrt(|r|) otherwise. Keeps each wavenumber exactly real or exactly
// imaginary for real detuning.
std::complex<double> branch_sqrt(double radicand) {
    if (radicand >= 0.0) return {std::sqrt(radicand), 0.0};
    return {0.0, std::sqrt(-radicand)};
}

}  // namespace

WaveNumbers wavenumbers(const PhysicalConfig& config) {
    const double delta = detuning(config);
    const double hbar_J0 = config.hbar * config.coupling;
    const double scale = 2.0 * config.mass / (config.hbar * config.hbar);
    return WaveNumbers{
        branch_sqrt(scale * (delta - hbar_J0)),
        branch_sqrt(scale * (delta + hbar_J0)),
    };
}

double mass_from_resonance(double resonance_energy, double medium_speed) {
    if (!(std::isfinite(resonance_energy) && resonance_energy > 0.0))
        throw std::domain_error("mass_from_resonance: resonance energy must be positive");
    if (!(std::isfinite(medium_speed) && medium_speed > 0.0))
        throw std::domain_error("mass_from_resonance: medium speed must be positive");
    return resonance_energy / (medium_speed * medium_speed);
}

}  // namespace cwt
