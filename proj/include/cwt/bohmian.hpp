#ifndef CWT_BOHMIAN_HPP
#define CWT_BOHMIAN_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "cwt/closed_form.hpp"
#include "cwt/core_model.hpp"

namespace cwt {

enum class Waveguide { Main, Auxiliary };

std::string to_string(Waveguide waveguide);

/// Amplitudes below node_threshold_scale * |c0| count as nodes; velocity
/// and energy operations refuse them and the trajectory integrator treats
/// them as absorbing.
inline constexpr double node_threshold_scale = 1e-10;

class node_error : public std::domain_error {
public:
    explicit node_error(const std::string& what) : std::domain_error(what) {}
};

/// Polar (Madelung) decomposition psi_i = R_i e^{iS_i} at one grid point.
/// Phases are unwrapped by continuity along the grid; where an amplitude
/// vanishes exactly the phase is interpolated from neighbours and the
/// sample is flagged.
struct PolarField {
    double R_m = 0.0;
    double S_m = 0.0;
    double R_a = 0.0;
    double S_a = 0.0;
    double x = 0.0;
    bool node_m = false;
    bool node_a = false;
};

/// Decomposes both fields along an ascending grid of x >= 0 positions.
/// Throws std::domain_error for grids with fewer than 2 points and
/// std::invalid_argument for unsorted or negative grids.
std::vector<PolarField> polar_decompose(const PhysicalConfig& config,
                                        std::span<const double> x_grid);

/// Guiding-equation velocity v = (hbar/m) Im(psi* dpsi) / |psi|^2.
/// Throws node_error below the node threshold.
double bohm_velocity(const PhysicalConfig& config, double x,
                     Waveguide waveguide);

/// Quantum potential -(hbar^2/2m)(d^2R/dx^2)/R, with the amplitude
/// curvature evaluated analytically through rho = psi* psi:
///   R''/R = (2 rho rho'' - rho'^2) / (4 rho^2).
double quantum_potential(const PhysicalConfig& config, double x,
                         Waveguide waveguide);

/// Inter-mode coupling energy hbar*J0 (R_j/R_i cos(S_j - S_i) - 1),
/// evaluated node-safely as hbar*J0 (Re(psi_j psi_i*)/|psi_i|^2 - 1).
double coupling_energy(const PhysicalConfig& config, double x,
                       Waveguide waveguide);

/// Per-term energy decomposition of the stationary Hamilton-Jacobi
/// equation; total = kinetic + quantum_potential + external + coupling.
struct EnergyBudget {
    double kinetic = 0.0;
    double quantum_potential = 0.0;
    double external = 0.0;
    double coupling = 0.0;
    double total = 0.0;
};

EnergyBudget energy_budget(const PhysicalConfig& config, double x,
                           Waveguide waveguide);

/// E - (kinetic + quantum potential + V0 + coupling); zero for the exact
/// solution since the stationary total energy is E.
double hj_residual(const PhysicalConfig& config, double x,
                   Waveguide waveguide);

/// Tunnelling current j0 = 2 J0 R_m R_a sin(S_a - S_m), computed in the
/// node-safe complex form -i J0 (psi_a psi_m* - psi_a* psi_m). The result
/// is real; the imaginary part is checked against 1e-14 of the magnitude.
double tunnelling_current(const PhysicalConfig& config, double x);

/// Probability flux rho*v = (hbar/m) Im(psi* dpsi); finite at nodes.
double probability_flux(const PhysicalConfig& config, double x,
                        Waveguide waveguide);

/// Analytic d/dx of the probability flux, (hbar/m) Im(psi* d2psi).
double flux_divergence(const PhysicalConfig& config, double x,
                       Waveguide waveguide);

/// Residual of the modified continuity equation:
///   main:      d/dx(rho_m v_m) - j0
///   auxiliary: d/dx(rho_a v_a) + j0
/// Identically zero for the exact solution; node-safe.
double continuity_residual(const PhysicalConfig& config, double x,
                           Waveguide waveguide);

/// Small-x population coefficient reconstructed from the Bohmian
/// continuity equation with the detuning continued to Delta + i*epsilon:
///   C_B = (m J0/hbar) (Re k_minus - Re k_plus)/(Re k_minus + Re k_plus).
/// Converges to rho_a_coefficient as epsilon -> 0 in every regime.
/// Throws std::domain_error for epsilon <= 0.
double rho_a_bohm_coefficient(const PhysicalConfig& config, double epsilon);

/// Default continuation parameter 1e-8 * hbar * J0.
double default_continuation_epsilon(const PhysicalConfig& config);

/// Time-ordered positions of one Bohmian particle. truncated marks an
/// integration stopped early at a node or the domain edge.
struct Trajectory {
    Waveguide waveguide = Waveguide::Main;
    std::vector<double> times;
    std::vector<double> positions;
    bool truncated = false;
};

/// Classic 4th-order Runge-Kutta integration of dx/dt = bohm_velocity(x)
/// from x0 until t_end. Starting at a node throws node_error; nodes
/// reached later absorb the trajectory (flagged truncated).
Trajectory integrate_trajectory(const PhysicalConfig& config, double x0,
                                Waveguide waveguide, double t_end, double dt);

}  // namespace cwt

#endif  // CWT_BOHMIAN_HPP
