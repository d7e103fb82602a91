// Command-line front end: parameter ingestion, sweep generation and
// verification runs for the coupled-waveguide tunnelling model.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cwt/sweep.hpp"

namespace {

struct FlagBuffer {
    cwt::sweep::Settings settings;
    std::string config_path;
    bool inject_j0_sign_flip = false;

    // CLI11 writes into these; only flags the user actually passed are
    // moved into settings so that file values survive the merge.
    double hbar = 0, mass = 0, coupling = 0, step_potential = 0, energy = 0;
    double amplitude_re = 0, amplitude_im = 0, delta = 0;
    double x_min = 0, x_max = 0, delta_min = 0, delta_max = 0;
    int points = 0;
    std::vector<double> positions;
    std::string out, format, waveguide;
    double epsilon = 0, x0 = 0, t_end = 0, dt = 0;
};

void add_common_options(CLI::App* cmd, FlagBuffer& buffer) {
    cmd->add_option("--config", buffer.config_path,
                    "flat key=value config file; flags override it");
    cmd->add_option("--hbar", buffer.hbar, "reduced Planck constant (default 1)");
    cmd->add_option("--mass", buffer.mass, "effective photon mass (default 1)");
    cmd->add_option("--coupling", buffer.coupling,
                    "inter-waveguide coupling J0 (default 1)");
    cmd->add_option("--step-potential,--step_potential", buffer.step_potential,
                    "step potential V0 (default 0)");
    cmd->add_option("--energy", buffer.energy, "state energy E (default 0)");
    cmd->add_option("--delta", buffer.delta,
                    "detuning in units of hbar*J0; overrides --energy");
    cmd->add_option("--amplitude-re,--amplitude_re", buffer.amplitude_re,
                    "Re c0 (default 1)");
    cmd->add_option("--amplitude-im,--amplitude_im", buffer.amplitude_im,
                    "Im c0 (default 0)");
    cmd->add_option("--out", buffer.out, "output path ('-' = stdout)");
    cmd->add_option("--format", buffer.format, "csv or json (default csv)");
}

cwt::sweep::Settings collect(const CLI::App* cmd, FlagBuffer& b) {
    // Not every subcommand defines every option; only passed flags count.
    const auto passed = [cmd](const char* name) {
        const CLI::Option* option = cmd->get_option_no_throw(name);
        return option != nullptr && option->count() > 0;
    };
    cwt::sweep::Settings s;
    const auto set = [&passed](const char* name, auto& dst, const auto& src) {
        if (passed(name)) dst = src;
    };
    set("--hbar", s.hbar, b.hbar);
    set("--mass", s.mass, b.mass);
    set("--coupling", s.coupling, b.coupling);
    set("--step-potential", s.step_potential, b.step_potential);
    set("--energy", s.energy, b.energy);
    set("--delta", s.delta, b.delta);
    set("--amplitude-re", s.amplitude_re, b.amplitude_re);
    set("--amplitude-im", s.amplitude_im, b.amplitude_im);
    set("--out", s.out, b.out);
    set("--format", s.format, b.format);
    set("--x-min", s.x_min, b.x_min);
    set("--x-max", s.x_max, b.x_max);
    set("--points", s.points, b.points);
    set("--delta-min", s.delta_min, b.delta_min);
    set("--delta-max", s.delta_max, b.delta_max);
    set("--positions", s.positions, b.positions);
    set("--epsilon", s.epsilon, b.epsilon);
    set("--x0", s.x0, b.x0);
    set("--t-end", s.t_end, b.t_end);
    set("--dt", s.dt, b.dt);
    set("--waveguide", s.waveguide, b.waveguide);
    return s;
}

int dispatch(const CLI::App* cmd, FlagBuffer& buffer, cwt::sweep::Mode mode) {
    cwt::sweep::Settings from_file;
    if (!buffer.config_path.empty())
        from_file = cwt::sweep::parse_settings_file(buffer.config_path);
    const cwt::sweep::Settings merged =
        cwt::sweep::merge(from_file, collect(cmd, buffer));
    cwt::sweep::SweepRequest request = cwt::sweep::build_request(merged, mode);
    request.inject_j0_sign_flip = buffer.inject_j0_sign_flip;
    return cwt::sweep::run(request, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled-waveguide tunnelling model: closed-form fields, "
                 "Bohmian quantities and verification sweeps"};
    app.require_subcommand(1);

    FlagBuffer buffer;
    std::optional<cwt::sweep::Mode> mode;

    const auto make = [&](const char* name, const char* help,
                          cwt::sweep::Mode m) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common_options(cmd, buffer);
        cmd->callback([&mode, m] { mode = m; });
        return cmd;
    };

    CLI::App* wavefield =
        make("wavefield", "fields, populations, current and velocities over x",
             cwt::sweep::Mode::Wavefield);
    wavefield->add_option("--x-min,--x_min", buffer.x_min, "sweep start (default 0)");
    wavefield->add_option("--x-max,--x_max", buffer.x_max, "sweep stop (default 10)");
    wavefield->add_option("--points", buffer.points, "sample count (default 500)");

    CLI::App* speed = make("speed-curve",
                           "semi-classical speed vs detuning (closed form, "
                           "sample fit, sqrt(2|Delta|/m) comparison)",
                           cwt::sweep::Mode::SpeedCurve);
    speed->add_option("--delta-min,--delta_min", buffer.delta_min,
                      "detuning sweep start in hbar*J0 units (default -5)");
    speed->add_option("--delta-max,--delta_max", buffer.delta_max,
                      "detuning sweep stop (default 5)");
    speed->add_option("--points", buffer.points, "sample count (default 201)");

    CLI::App* velocity = make("velocity-curve",
                              "Bohmian velocities vs detuning at fixed positions",
                              cwt::sweep::Mode::VelocityCurve);
    velocity->add_option("--delta-min,--delta_min", buffer.delta_min,
                         "detuning sweep start in hbar*J0 units (default -5)");
    velocity->add_option("--delta-max,--delta_max", buffer.delta_max,
                         "detuning sweep stop (default 5)");
    velocity->add_option("--points", buffer.points, "sample count (default 201)");
    velocity->add_option("--positions", buffer.positions,
                         "positions to sample (default 5 10 20 40)")
        ->delimiter(',');

    CLI::App* coefficients =
        make("coefficients",
             "closed-form vs Bohmian vs numeric population coefficients",
             cwt::sweep::Mode::Coefficients);
    coefficients->add_option("--delta-min,--delta_min", buffer.delta_min,
                             "uniform sweep start (needs --points)");
    coefficients->add_option("--delta-max,--delta_max", buffer.delta_max,
                             "uniform sweep stop (needs --points)");
    coefficients->add_option("--points", buffer.points,
                             "uniform sweep sample count (default: built-in set)");
    coefficients->add_option("--epsilon", buffer.epsilon,
                             "analytic-continuation epsilon (default 1e-8 hbar J0)");

    CLI::App* verify = make("verify",
                            "run all module invariants; nonzero exit on failure",
                            cwt::sweep::Mode::Verify);
    verify->add_flag("--inject-j0-sign-flip", buffer.inject_j0_sign_flip,
                     "test hook: flip the tunnelling-current sign inside the "
                     "continuity checks (must make verify fail)");

    CLI::App* trajectory = make("trajectory", "integrate one Bohmian trajectory",
                                cwt::sweep::Mode::Trajectory);
    trajectory->add_option("--x0", buffer.x0, "start position (default 1)");
    trajectory->add_option("--waveguide", buffer.waveguide,
                           "main or auxiliary (default main)");
    trajectory->add_option("--t-end,--t_end", buffer.t_end,
                           "integration time (default 10)");
    trajectory->add_option("--dt", buffer.dt, "time step (default 1e-3)");

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd :
             {wavefield, speed, velocity, coefficients, verify, trajectory}) {
            if (cmd->parsed()) return dispatch(cmd, buffer, *mode);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
}
