#include "cwt/closed_form.hpp"

#include <cmath>

namespace cwt {

WaveField eval_fields(const PhysicalConfig& config, double x) {
    if (!(std::isfinite(x) && x >= 0.0))
        throw std::domain_error("eval_fields: x must be >= 0 (region past the step)");
    const WaveNumbers k = wavenumbers(config);
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> half_c0 = 0.5 * config.amplitude;
    const std::complex<double> ep = std::exp(i * k.k_plus * x);
    const std::complex<double> em = std::exp(i * k.k_minus * x);

    WaveField f;
    f.x = x;
    f.psi_m = half_c0 * (ep + em);
    f.psi_a = half_c0 * (ep - em);
    f.dpsi_m_dx = half_c0 * (i * k.k_plus * ep + i * k.k_minus * em);
    f.dpsi_a_dx = half_c0 * (i * k.k_plus * ep - i * k.k_minus * em);
    const std::complex<double> kp2 = k.k_plus * k.k_plus;
    const std::complex<double> km2 = k.k_minus * k.k_minus;
    f.d2psi_m_dx2 = -half_c0 * (kp2 * ep + km2 * em);
    f.d2psi_a_dx2 = -half_c0 * (kp2 * ep - km2 * em);
    return f;
}

PopulationSample population(const PhysicalConfig& config, double x) {
    const WaveField f = eval_fields(config, x);
    const double raw = std::norm(f.psi_a);
    const double denom = raw + std::norm(f.psi_m);
    if (denom == 0.0)
        throw tail_underflow_error(
            "population: both populations underflowed at x = " + std::to_string(x));
    return PopulationSample{x, raw, raw / denom};
}

double rho_a_coefficient(const PhysicalConfig& config) {
    const double delta = detuning(config);
    const double hbar_J0 = config.hbar * config.coupling;
    if (std::abs(delta) <= hbar_J0)  // plateau
        return config.mass * config.coupling / config.hbar;
    const double root_sum = std::sqrt(std::abs(delta + hbar_J0)) +
                            std::sqrt(std::abs(delta - hbar_J0));
    return 2.0 * config.mass * config.coupling * config.coupling /
           (root_sum * root_sum);
}

double semiclassical_speed(const PhysicalConfig& config) {
    return config.coupling / std::sqrt(rho_a_coefficient(config));
}

double fit_speed_from_samples(std::span<const PopulationSample> samples,
                              double coupling, double window) {
    if (!(std::isfinite(coupling) && coupling > 0.0))
        throw std::invalid_argument("fit_speed_from_samples: coupling must be positive");
    if (!(std::isfinite(window) && window > 0.0))
        throw std::invalid_argument("fit_speed_from_samples: window must be positive");

    double sum_x4 = 0.0;
    double sum_rho_x2 = 0.0;
    int used = 0;
    for (const PopulationSample& s : samples) {
        if (!(s.x > 0.0) || s.x > window) continue;
        if (!(s.rho_a_norm >= 0.0))
            throw std::invalid_argument("fit_speed_from_samples: negative population sample");
        const double x2 = s.x * s.x;
        sum_x4 += x2 * x2;
        sum_rho_x2 += s.rho_a_norm * x2;
        ++used;
    }
    if (used < 3)
        throw std::invalid_argument(
            "fit_speed_from_samples: need at least 3 samples with 0 < x <= window");

    const double coeff = sum_rho_x2 / sum_x4;  // >= 0 since every rho >= 0
    if (coeff <= 0.0)
        throw std::domain_error("fit_speed_from_samples: degenerate all-zero fit");
    return coupling / std::sqrt(coeff);
}

double default_fit_window(const PhysicalConfig& config) {
    config.validate();
    return 0.05 * config.hbar /
           std::sqrt(2.0 * config.mass * config.hbar * config.coupling);
}

}  // namespace cwt
