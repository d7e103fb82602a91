#include "cwt/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cwt {

std::string to_string(Waveguide waveguide) {
    return waveguide == Waveguide::Main ? "main" : "auxiliary";
}

namespace {

using cd = std::complex<double>;

struct ModeView {
    cd psi;
    cd dpsi;
    cd d2psi;
};

ModeView select(const WaveField& f, Waveguide waveguide) {
    if (waveguide == Waveguide::Main)
        return {f.psi_m, f.dpsi_m_dx, f.d2psi_m_dx2};
    return {f.psi_a, f.dpsi_a_dx, f.d2psi_a_dx2};
}

ModeView other(const WaveField& f, Waveguide waveguide) {
    return select(f, waveguide == Waveguide::Main ? Waveguide::Auxiliary
                                                  : Waveguide::Main);
}

double node_floor(const PhysicalConfig& config) {
    return node_threshold_scale * std::abs(config.amplitude);
}

void require_above_node(const PhysicalConfig& config, const ModeView& mode,
                        Waveguide waveguide, double x) {
    if (std::abs(mode.psi) < node_floor(config))
        throw node_error("amplitude of " + to_string(waveguide) +
                         " waveguide below node threshold at x = " +
                         std::to_string(x));
}

double velocity_impl(const PhysicalConfig& config, const ModeView& m) {
    return config.hbar / config.mass *
           std::imag(std::conj(m.psi) * m.dpsi) / std::norm(m.psi);
}

double quantum_potential_impl(const PhysicalConfig& config, const ModeView& m) {
    // R''/R through rho = psi* psi, so no phase enters:
    //   rho'  = 2 Re(psi* psi'),  rho'' = 2 Re(psi* psi'') + 2 |psi'|^2
    //   R''/R = (2 rho rho'' - rho'^2) / (4 rho^2)
    const double rho = std::norm(m.psi);
    const double drho = 2.0 * std::real(std::conj(m.psi) * m.dpsi);
    const double d2rho =
        2.0 * std::real(std::conj(m.psi) * m.d2psi) + 2.0 * std::norm(m.dpsi);
    const double curvature = (2.0 * rho * d2rho - drho * drho) / (4.0 * rho * rho);
    return -config.hbar * config.hbar / (2.0 * config.mass) * curvature;
}

double coupling_energy_impl(const PhysicalConfig& config, const ModeView& self,
                            const ModeView& partner) {
    // (R_j/R_i) cos(S_j - S_i) = Re(psi_j psi_i*) / |psi_i|^2
    const double projection =
        std::real(partner.psi * std::conj(self.psi)) / std::norm(self.psi);
    return config.hbar * config.coupling * (projection - 1.0);
}

double wrap_to_pi(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return angle - two_pi * std::round(angle / two_pi);
}

}  // namespace

double bohm_velocity(const PhysicalConfig& config, double x,
                     Waveguide waveguide) {
    const WaveField f = eval_fields(config, x);
    const ModeView m = select(f, waveguide);
    require_above_node(config, m, waveguide, x);
    return velocity_impl(config, m);
}

double quantum_potential(const PhysicalConfig& config, double x,
                         Waveguide waveguide) {
    const WaveField f = eval_fields(config, x);
    const ModeView m = select(f, waveguide);
    require_above_node(config, m, waveguide, x);
    return quantum_potential_impl(config, m);
}

double coupling_energy(const PhysicalConfig& config, double x,
                       Waveguide waveguide) {
    const WaveField f = eval_fields(config, x);
    const ModeView self = select(f, waveguide);
    require_above_node(config, self, waveguide, x);
    return coupling_energy_impl(config, self, other(f, waveguide));
}

EnergyBudget energy_budget(const PhysicalConfig& config, double x,
                           Waveguide waveguide) {
    const WaveField f = eval_fields(config, x);
    const ModeView self = select(f, waveguide);
    require_above_node(config, self, waveguide, x);

    EnergyBudget budget;
    const double v = velocity_impl(config, self);
    budget.kinetic = 0.5 * config.mass * v * v;
    budget.quantum_potential = quantum_potential_impl(config, self);
    budget.external = config.step_potential;
    budget.coupling = coupling_energy_impl(config, self, other(f, waveguide));
    budget.total = budget.kinetic + budget.quantum_potential + budget.external +
                   budget.coupling;
    return budget;
}

double hj_residual(const PhysicalConfig& config, double x,
                   Waveguide waveguide) {
    return config.energy - energy_budget(config, x, waveguide).total;
}

double tunnelling_current(const PhysicalConfig& config, double x) {
    const WaveField f = eval_fields(config, x);
    const cd z = cd(0.0, -config.coupling) *
                 (f.psi_a * std::conj(f.psi_m) - std::conj(f.psi_a) * f.psi_m);
    if (std::abs(z.imag()) > 1e-14 * std::abs(z))
        throw std::logic_error("tunnelling_current: result not real");
    return z.real();
}

double probability_flux(const PhysicalConfig& config, double x,
                        Waveguide waveguide) {
    const WaveField f = eval_fields(config, x);
    const ModeView m = select(f, waveguide);
    return config.hbar / config.mass * std::imag(std::conj(m.psi) * m.dpsi);
}

double flux_divergence(const PhysicalConfig& config, double x,
                       Waveguide waveguide) {
    // d/dx Im(psi* psi') = Im(psi* psi''), the |psi'|^2 term being real
    const WaveField f = eval_fields(config, x);
    const ModeView m = select(f, waveguide);
    return config.hbar / config.mass * std::imag(std::conj(m.psi) * m.d2psi);
}

double continuity_residual(const PhysicalConfig& config, double x,
                           Waveguide waveguide) {
    const double j0 = tunnelling_current(config, x);
    const double div = flux_divergence(config, x, waveguide);
    return waveguide == Waveguide::Main ? div - j0 : div + j0;
}

double rho_a_bohm_coefficient(const PhysicalConfig& config, double epsilon) {
    const double delta = detuning(config);
    if (!(std::isfinite(epsilon) && epsilon > 0.0))
        throw std::domain_error("rho_a_bohm_coefficient: epsilon must be positive");
    const double hbar_J0 = config.hbar * config.coupling;
    const double scale = 2.0 * config.mass / (config.hbar * config.hbar);
    const cd delta_c(delta, epsilon);
    // Principal sqrt of an upper-half-plane radicand has Re > 0, Im > 0,
    // matching the decaying-branch convention of wavenumbers().
    const cd k_plus = std::sqrt(scale * (delta_c - hbar_J0));
    const cd k_minus = std::sqrt(scale * (delta_c + hbar_J0));
    const double re_p = k_plus.real();
    const double re_m = k_minus.real();
    return config.mass * config.coupling / config.hbar * (re_m - re_p) /
           (re_m + re_p);
}

double default_continuation_epsilon(const PhysicalConfig& config) {
    config.validate();
    return 1e-8 * config.hbar * config.coupling;
}

std::vector<PolarField> polar_decompose(const PhysicalConfig& config,
                                        std::span<const double> x_grid) {
    if (x_grid.size() < 2)
        throw std::domain_error("polar_decompose: grid needs at least 2 points");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(std::isfinite(x_grid[i]) && x_grid[i] >= 0.0))
            throw std::invalid_argument("polar_decompose: grid points must be >= 0");
        if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
            throw std::invalid_argument("polar_decompose: grid must be ascending");
    }

    const double floor = node_floor(config);
    std::vector<PolarField> fields(x_grid.size());

    // Per-waveguide pass: principal phases, continuity unwrap, then linear
    // interpolation of the phase across samples where it is undefined
    // (amplitude exactly zero, e.g. psi_a at x = 0).
    auto decompose = [&](Waveguide wg, auto&& r_of, auto&& s_of, auto&& flag_of) {
        std::vector<bool> defined(x_grid.size(), false);
        double prev_arg = 0.0;
        double prev_s = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            const WaveField f = eval_fields(config, x_grid[i]);
            const ModeView m = select(f, wg);
            const double r = std::abs(m.psi);
            r_of(fields[i]) = r;
            flag_of(fields[i]) = r < floor;
            if (r == 0.0) continue;  // phase undefined, fill in below
            const double arg = std::arg(m.psi);
            const double s = have_prev ? prev_s + wrap_to_pi(arg - prev_arg) : arg;
            s_of(fields[i]) = s;
            defined[i] = true;
            prev_arg = arg;
            prev_s = s;
            have_prev = true;
        }
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            if (defined[i]) continue;
            std::size_t left = i, right = i;
            while (left > 0 && !defined[left]) --left;
            while (right + 1 < x_grid.size() && !defined[right]) ++right;
            if (defined[left] && defined[right] && left != right) {
                const double t = (x_grid[i] - x_grid[left]) /
                                 (x_grid[right] - x_grid[left]);
                s_of(fields[i]) =
                    s_of(fields[left]) + t * (s_of(fields[right]) - s_of(fields[left]));
            } else if (defined[right]) {
                s_of(fields[i]) = s_of(fields[right]);
            } else if (defined[left]) {
                s_of(fields[i]) = s_of(fields[left]);
            }  // else: no defined phase anywhere, leave 0
        }
    };

    for (std::size_t i = 0; i < x_grid.size(); ++i) fields[i].x = x_grid[i];
    decompose(
        Waveguide::Main, [](PolarField& p) -> double& { return p.R_m; },
        [](PolarField& p) -> double& { return p.S_m; },
        [](PolarField& p) -> bool& { return p.node_m; });
    decompose(
        Waveguide::Auxiliary, [](PolarField& p) -> double& { return p.R_a; },
        [](PolarField& p) -> double& { return p.S_a; },
        [](PolarField& p) -> bool& { return p.node_a; });
    return fields;
}

Trajectory integrate_trajectory(const PhysicalConfig& config, double x0,
                                Waveguide waveguide, double t_end, double dt) {
    config.validate();
    if (!(std::isfinite(x0) && x0 > 0.0))
        throw std::invalid_argument("integrate_trajectory: x0 must be positive");
    if (!(std::isfinite(dt) && dt > 0.0))
        throw std::invalid_argument("integrate_trajectory: dt must be positive");
    if (!(std::isfinite(t_end) && t_end >= 0.0))
        throw std::invalid_argument("integrate_trajectory: t_end must be >= 0");

    // A node at the start is the caller's mistake; propagate as an error.
    (void)bohm_velocity(config, x0, waveguide);

    Trajectory traj;
    traj.waveguide = waveguide;
    traj.times.push_back(0.0);
    traj.positions.push_back(x0);

    double x = x0;
    double t = 0.0;
    for (long step = 1; t < t_end; ++step) {
        const double t_next = std::min(static_cast<double>(step) * dt, t_end);
        const double h = t_next - t;
        if (!(h > 0.0)) break;
        double x_new;
        try {
            const double k1 = bohm_velocity(config, x, waveguide);
            const double k2 = bohm_velocity(config, x + 0.5 * h * k1, waveguide);
            const double k3 = bohm_velocity(config, x + 0.5 * h * k2, waveguide);
            const double k4 = bohm_velocity(config, x + h * k3, waveguide);
            x_new = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const std::domain_error&) {
            // Node or domain edge reached mid-flight: absorbing boundary.
            traj.truncated = true;
            break;
        }
        if (!std::isfinite(x_new)) {
            traj.truncated = true;
            break;
        }
        x = x_new;
        t = t_next;
        traj.times.push_back(t);
        traj.positions.push_back(x);
    }
    return traj;
}

}  // namespace cwt
