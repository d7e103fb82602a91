// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not tuned at run time.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cwt/bohmian.hpp"
#include "cwt/closed_form.hpp"
#include "cwt/core_model.hpp"
#include "cwt/oracle.hpp"
#include "cwt/sweep.hpp"

using namespace cwt;

namespace {

PhysicalConfig config_at_delta(double delta) {
    PhysicalConfig config;  // hbar = m = J0 = 1, V0 = 0, c0 = 1
    config.energy = delta - 1.0;
    return config;
}

// Shared sweep: 50 detunings across all regimes, 256-point grid on [0, 5].
std::vector<double> sweep_deltas() {
    std::vector<double> deltas(50);
    for (int i = 0; i < 50; ++i) deltas[i] = -10.0 + 20.0 * i / 49.0;
    return deltas;
}

constexpr int grid_points = 256;
constexpr double grid_max = 5.0;

double grid_x(int i) { return grid_max * i / (grid_points - 1); }

struct Criterion {
    int number;
    std::string summary;
    std::function<std::string()> check;  // returns detail; throws on failure
};

struct failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.3g", v);
    return buffer;
}

// --- criterion 1 -----------------------------------------------------------

std::string check_stationary_residual() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    const oracle::GridSpec grid{0.0, grid_max, grid_points};
    for (const double d : sweep_deltas()) {
        const PhysicalConfig config = config_at_delta(d);
        for (const Waveguide wg : {Waveguide::Main, Waveguide::Auxiliary}) {
            const auto report = oracle::stationary_residual(config, grid, wg);
            worst = std::max(worst, report.max_abs);
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (worst >= 1e-8)
        throw failure("max residual " + fmt(worst) + " >= 1e-8");
    if (seconds >= 5.0)
        throw failure("runtime " + fmt(seconds) + " s >= 5 s");
    return "max residual " + fmt(worst) + ", " + fmt(seconds) + " s";
}

// --- criterion 2 -----------------------------------------------------------

std::string check_continuity() {
    double worst = 0.0;
    for (const double d : sweep_deltas()) {
        const PhysicalConfig config = config_at_delta(d);
        for (int i = 0; i < grid_points; ++i) {
            const double x = grid_x(i);
            worst = std::max(
                worst, std::abs(continuity_residual(config, x, Waveguide::Main)));
            worst = std::max(
                worst,
                std::abs(continuity_residual(config, x, Waveguide::Auxiliary)));
        }
    }
    if (worst >= 1e-9)
        throw failure("max |d(rho v)/dx -+ j0| = " + fmt(worst) + " >= 1e-9");
    return "max residual " + fmt(worst);
}

// --- criterion 3 -----------------------------------------------------------

std::string check_coefficient_triple() {
    double worst = 0.0;
    for (const double d :
         {-10.0, -2.0, -1.001, -0.5, 0.0, 0.5, 1.001, 2.0, 10.0}) {
        const PhysicalConfig config = config_at_delta(d);
        const double closed = rho_a_coefficient(config);
        const double bohmian =
            rho_a_bohm_coefficient(config, default_continuation_epsilon(config));
        const double numeric = oracle::numeric_quadratic_coefficient(config);
        worst = std::max({worst, std::abs(closed - bohmian) / closed,
                          std::abs(closed - numeric) / closed,
                          std::abs(bohmian - numeric) / closed});
    }
    if (worst >= 1e-4)
        throw failure("pairwise disagreement " + fmt(worst) + " >= 1e-4");
    return "max pairwise relative gap " + fmt(worst);
}

// --- criterion 4 -----------------------------------------------------------

std::string check_plateau() {
    const double expected = 1.0;  // sqrt(hbar J0 / m) in default units
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double d = -1.0 + 2.0 * (i + 0.5) / 100.0;
        const double v = semiclassical_speed(config_at_delta(d));
        worst = std::max(worst, std::abs(v - expected) / expected);
    }
    if (worst >= 1e-12)
        throw failure("plateau deviation " + fmt(worst) + " >= 1e-12");
    return "max relative deviation " + fmt(worst);
}

// --- criterion 5 -----------------------------------------------------------

std::string check_velocity_laws() {
    const std::vector<double> positions = {0.3, 0.7, 1.3, 2.1, 3.9};
    double worst_evanescent = 0.0;
    for (const double d : {-1.2, -2.0, -5.0, -10.0}) {
        const PhysicalConfig config = config_at_delta(d);
        for (const double x : positions) {
            worst_evanescent =
                std::max(worst_evanescent,
                         std::abs(bohm_velocity(config, x, Waveguide::Main)));
            worst_evanescent = std::max(
                worst_evanescent,
                std::abs(bohm_velocity(config, x, Waveguide::Auxiliary)));
        }
    }
    if (worst_evanescent >= 1e-12)
        throw failure("evanescent |v| = " + fmt(worst_evanescent) + " >= 1e-12");

    double worst_transmission = 0.0;
    for (const double d : {1.5, 2.0, 5.0, 10.0}) {
        const PhysicalConfig config = config_at_delta(d);
        const WaveNumbers k = wavenumbers(config);
        const double expected = 0.5 * (k.k_plus.real() + k.k_minus.real());
        for (const double x : positions) {
            const double v_m = bohm_velocity(config, x, Waveguide::Main);
            const double v_a = bohm_velocity(config, x, Waveguide::Auxiliary);
            worst_transmission =
                std::max({worst_transmission, std::abs(v_m - v_a),
                          std::abs(v_m - expected), std::abs(v_a - expected)});
        }
    }
    if (worst_transmission >= 1e-12)
        throw failure("transmission velocity spread " + fmt(worst_transmission) +
                      " >= 1e-12");
    return "evanescent max " + fmt(worst_evanescent) + ", transmission spread " +
           fmt(worst_transmission);
}

// --- criterion 6 -----------------------------------------------------------

std::string check_asymptotics() {
    const PhysicalConfig config = config_at_delta(1e4);
    const double ratio = semiclassical_speed(config) /
                         std::sqrt(2.0 * std::abs(detuning(config)));
    const double deviation = std::abs(ratio - 1.0);
    if (deviation >= 2e-4)
        throw failure("|v / sqrt(2|Delta|/m) - 1| = " + fmt(deviation) +
                      " >= 2e-4");
    return "deviation " + fmt(deviation);
}

// --- criterion 7 -----------------------------------------------------------

std::string check_hj_budget() {
    double worst = 0.0;
    int skipped_nodes = 0;
    for (const double d : sweep_deltas()) {
        const PhysicalConfig config = config_at_delta(d);
        const double scale = std::max(std::abs(config.energy), 1.0);
        for (int i = 0; i < grid_points; ++i) {
            const double x = grid_x(i);
            for (const Waveguide wg : {Waveguide::Main, Waveguide::Auxiliary}) {
                try {
                    worst = std::max(worst,
                                     std::abs(hj_residual(config, x, wg)) / scale);
                } catch (const node_error&) {
                    ++skipped_nodes;
                }
            }
        }
    }
    if (worst >= 1e-8)
        throw failure("normalized residual " + fmt(worst) + " >= 1e-8");
    return "max normalized residual " + fmt(worst) + " (" +
           std::to_string(skipped_nodes) + " node points skipped)";
}

// --- criterion 8 -----------------------------------------------------------

std::string check_continuation_convergence() {
    const PhysicalConfig config = config_at_delta(-5.0);
    const double closed = rho_a_coefficient(config);
    std::vector<double> errors;
    for (const double eps : {1e-3, 1e-6, 1e-9})
        errors.push_back(std::abs(rho_a_bohm_coefficient(config, eps) - closed));
    if (!(errors[0] > errors[1] && errors[1] > errors[2]))
        throw failure("errors not monotone: " + fmt(errors[0]) + ", " +
                      fmt(errors[1]) + ", " + fmt(errors[2]));
    if (errors[2] >= 1e-4 * closed)
        throw failure("final error " + fmt(errors[2] / closed) + " >= 1e-4");
    return "errors " + fmt(errors[0]) + " > " + fmt(errors[1]) + " > " +
           fmt(errors[2]);
}

// --- criterion 9 -----------------------------------------------------------

std::string check_fit_recovery() {
    // Noiseless synthetic quadratic data.
    const double v_true = 1.7;
    const double window = 0.05;
    std::vector<PopulationSample> samples;
    for (int i = 1; i <= 50; ++i) {
        const double x = window * i / 50.0;
        const double rho = (x / v_true) * (x / v_true);  // J0 = 1
        samples.push_back({x, rho, rho});
    }
    const double v_clean = fit_speed_from_samples(samples, 1.0, window);
    const double clean_error = std::abs(v_clean - v_true) / v_true;
    if (clean_error >= 1e-6)
        throw failure("noiseless recovery error " + fmt(clean_error) +
                      " >= 1e-6");

    // Additive noise sigma = 1e-6 on the populations.
    std::mt19937 rng(7u);
    std::normal_distribution<double> noise(0.0, 1e-6);
    double worst_noise = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<PopulationSample> noisy = samples;
        for (PopulationSample& s : noisy)
            s.rho_a_norm = std::max(0.0, s.rho_a_norm + noise(rng));
        const double v = fit_speed_from_samples(noisy, 1.0, window);
        worst_noise = std::max(worst_noise, std::abs(v - v_true) / v_true);
    }
    if (worst_noise >= 1e-3)
        throw failure("noisy recovery error " + fmt(worst_noise) + " >= 1e-3");
    return "clean " + fmt(clean_error) + ", noisy " + fmt(worst_noise);
}

// --- criterion 10 ----------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw failure("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string check_cli_determinism() {
#ifndef CWT_CLI_BIN
    throw failure("CLI binary path not configured");
#else
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cwt_acceptance";
    fs::create_directories(dir);
    const std::string bin = CWT_CLI_BIN;

    const std::vector<std::string> sweeps = {
        "wavefield --delta 0.7 --points 300",
        "speed-curve --delta-min -3 --delta-max 3 --points 61",
        "velocity-curve --points 41",
    };
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        const fs::path first = dir / ("run_a_" + std::to_string(i) + ".csv");
        const fs::path second = dir / ("run_b_" + std::to_string(i) + ".csv");
        for (const fs::path& out : {first, second}) {
            const std::string command =
                "'" + bin + "' " + sweeps[i] + " --out '" + out.string() + "'";
            if (std::system(command.c_str()) != 0)
                throw failure("CLI run failed: " + command);
        }
        const std::string a = read_file(first);
        const std::string b = read_file(second);
        if (a.empty() || a != b)
            throw failure("outputs differ for: " + sweeps[i]);
        bytes += a.size();
    }
    fs::remove_all(dir);
    return std::to_string(sweeps.size()) + " sweeps byte-identical (" +
           std::to_string(bytes / 2) + " bytes each pass)";
#endif
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "exact-solution stationary residual < 1e-8 over 50 configs",
         check_stationary_residual},
        {2, "modified continuity |d(rho v)/dx -+ j0| < 1e-9 everywhere",
         check_continuity},
        {3, "closed-form / Bohmian / oracle coefficients agree to 1e-4",
         check_coefficient_triple},
        {4, "plateau speed constant to 1e-12, value sqrt(hbar J0/m)",
         check_plateau},
        {5, "regime velocity laws (zero / identical with hbar(k+ + k-)/2m)",
         check_velocity_laws},
        {6, "asymptotic speed ratio within 2e-4 at Delta = 1e4 hbar J0",
         check_asymptotics},
        {7, "Hamilton-Jacobi budget residual < 1e-8 max(|E|, hbar J0)",
         check_hj_budget},
        {8, "epsilon-continuation errors decrease monotonically at Delta = -5",
         check_continuation_convergence},
        {9, "fit recovery: 1e-6 noiseless, 1e-3 under sigma = 1e-6 noise",
         check_fit_recovery},
        {10, "CLI sweeps are byte-identical across runs", check_cli_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        std::string status = "PASS";
        std::string detail;
        try {
            detail = criterion.check();
        } catch (const std::exception& error) {
            status = "FAIL";
            detail = error.what();
            ++failures;
        }
        std::printf("[%s] criterion %2d: %s (%s)\n", status.c_str(),
                    criterion.number, criterion.summary.c_str(), detail.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu acceptance criteria failed\n", failures,
                    criteria.size());
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}
