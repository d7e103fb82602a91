#include "cwt/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cwt/oracle.hpp"

namespace cwt::sweep {

namespace {

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // canonicalize -0
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return std::string(buffer);
}

PhysicalConfig config_at_delta(const PhysicalConfig& base,
                               double delta_over_hJ0) {
    PhysicalConfig config = base;
    const double hbar_J0 = base.hbar * base.coupling;
    config.energy = delta_over_hJ0 * hbar_J0 + base.step_potential - hbar_J0;
    return config;
}

std::vector<double> linspace(double start, double stop, int n) {
    std::vector<double> points(n);
    for (int i = 0; i < n; ++i)
        points[i] = start + (stop - start) * i / (n - 1);
    return points;
}

// Detunings (in units of hbar*J0) exercising all regimes plus both
// plateau boundaries; shared by the coefficients mode and verify.
const std::vector<double> canonical_deltas = {-10.0, -2.0, -1.001, -0.5, 0.0,
                                              0.5,   1.001, 2.0,   10.0};

std::vector<PopulationSample> fit_samples(const PhysicalConfig& config) {
    const double window = default_fit_window(config);
    std::vector<PopulationSample> samples;
    samples.reserve(default_fit_samples);
    for (int j = 1; j <= default_fit_samples; ++j)
        samples.push_back(population(config, window * j / default_fit_samples));
    return samples;
}

Cell velocity_cell(const PhysicalConfig& config, double x,
                   Waveguide waveguide) {
    try {
        return bohm_velocity(config, x, waveguide);
    } catch (const node_error&) {
        return std::monostate{};  // undefined at a node, emitted empty
    }
}

}  // namespace

void SweepRequest::validate() const {
    config.validate();
    const bool swept = mode == Mode::Wavefield || mode == Mode::SpeedCurve ||
                       mode == Mode::VelocityCurve;
    if (swept || (mode == Mode::Coefficients && n != 0)) {
        if (n < 2) throw std::invalid_argument("SweepRequest: need n >= 2");
        if (!(start < stop))
            throw std::invalid_argument("SweepRequest: need start < stop");
    }
    if (mode == Mode::VelocityCurve && fixed_positions.empty())
        throw std::invalid_argument(
            "SweepRequest: velocity_curve requires fixed positions");
    if (mode == Mode::Trajectory) {
        if (!(x0 > 0.0))
            throw std::invalid_argument("SweepRequest: trajectory x0 must be > 0");
        if (!(dt > 0.0) || !(t_end >= 0.0))
            throw std::invalid_argument("SweepRequest: invalid trajectory times");
    }
    if (epsilon < 0.0)
        throw std::invalid_argument("SweepRequest: epsilon must be >= 0");
}

void emit_csv(const Table& table, std::ostream& out) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            if (const double* v = std::get_if<double>(&row[c]))
                out << format_double(*v);
            else if (const std::string* s = std::get_if<std::string>(&row[c]))
                out << *s;
            // monostate: empty cell
        }
        out << "\n";
    }
}

void emit_json(const Table& table, std::ostream& out) {
    nlohmann::ordered_json doc;
    for (const auto& [key, cell] : table.annotations) {
        if (const double* v = std::get_if<double>(&cell))
            doc[key] = *v;
        else if (const std::string* s = std::get_if<std::string>(&cell))
            doc[key] = *s;
        else
            doc[key] = nullptr;
    }
    doc["columns"] = table.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            if (const double* v = std::get_if<double>(&cell))
                r.push_back(*v);
            else if (const std::string* s = std::get_if<std::string>(&cell))
                r.push_back(*s);
            else
                r.push_back(nullptr);
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << "\n";
}

Table wavefield_table(const SweepRequest& request) {
    const PhysicalConfig& config = request.config;
    Table table;
    table.columns = {"x",         "re_psi_m",   "im_psi_m", "re_psi_a",
                     "im_psi_a",  "rho_a_raw",  "rho_a_norm", "j0",
                     "v_m",       "v_a"};
    for (const double x : linspace(request.start, request.stop, request.n)) {
        const WaveField f = eval_fields(config, x);
        std::vector<Cell> row;
        row.emplace_back(x);
        row.emplace_back(f.psi_m.real());
        row.emplace_back(f.psi_m.imag());
        row.emplace_back(f.psi_a.real());
        row.emplace_back(f.psi_a.imag());
        row.emplace_back(std::norm(f.psi_a));
        try {
            row.emplace_back(population(config, x).rho_a_norm);
        } catch (const tail_underflow_error&) {
            row.emplace_back(std::monostate{});
        }
        row.emplace_back(tunnelling_current(config, x));
        row.push_back(velocity_cell(config, x, Waveguide::Main));
        row.push_back(velocity_cell(config, x, Waveguide::Auxiliary));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table speed_curve_table(const SweepRequest& request) {
    Table table;
    table.columns = {"delta_over_hJ0", "v_closed_form", "v_fit_from_samples",
                     "v_original_model"};
    for (const double d : linspace(request.start, request.stop, request.n)) {
        const PhysicalConfig config = config_at_delta(request.config, d);
        std::vector<Cell> row;
        row.emplace_back(d);
        row.emplace_back(semiclassical_speed(config));
        try {
            const auto samples = fit_samples(config);
            row.emplace_back(fit_speed_from_samples(
                samples, config.coupling, default_fit_window(config)));
        } catch (const std::exception&) {
            row.emplace_back(std::monostate{});
        }
        // The sqrt(2|Delta|/m) relation the measured plateau deviates from.
        row.emplace_back(std::sqrt(2.0 * std::abs(detuning(config)) / config.mass));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table velocity_curve_table(const SweepRequest& request) {
    Table table;
    table.columns = {"delta_over_hJ0", "x", "v_m", "v_a"};
    for (const double x : request.fixed_positions) {
        for (const double d : linspace(request.start, request.stop, request.n)) {
            const PhysicalConfig config = config_at_delta(request.config, d);
            std::vector<Cell> row;
            row.emplace_back(d);
            row.emplace_back(x);
            row.push_back(velocity_cell(config, x, Waveguide::Main));
            row.push_back(velocity_cell(config, x, Waveguide::Auxiliary));
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

CoefficientReport coefficient_report(const PhysicalConfig& config,
                                     double epsilon) {
    CoefficientReport report;
    report.closed_form = rho_a_coefficient(config);
    report.bohmian = rho_a_bohm_coefficient(config, epsilon);
    report.oracle = oracle::numeric_quadratic_coefficient(config);
    report.regime =
        classify_regime(detuning(config), config.hbar * config.coupling);
    return report;
}

Table coefficients_table(const SweepRequest& request) {
    std::vector<double> deltas =
        request.n == 0 ? canonical_deltas
                       : linspace(request.start, request.stop, request.n);
    const double epsilon =
        request.epsilon > 0.0 ? request.epsilon
                              : default_continuation_epsilon(request.config);
    Table table;
    table.columns = {"delta_over_hJ0", "c_closed_form", "c_bohmian", "c_oracle",
                     "regime"};
    for (const double d : deltas) {
        const PhysicalConfig config = config_at_delta(request.config, d);
        const CoefficientReport report = coefficient_report(config, epsilon);
        table.rows.push_back({Cell{d}, Cell{report.closed_form},
                              Cell{report.bohmian}, Cell{report.oracle},
                              Cell{to_string(report.regime)}});
    }
    return table;
}

Table trajectory_table(const SweepRequest& request) {
    const Trajectory trajectory = integrate_trajectory(
        request.config, request.x0, request.waveguide, request.t_end, request.dt);
    Table table;
    table.columns = {"t", "x"};
    for (std::size_t i = 0; i < trajectory.times.size(); ++i)
        table.rows.push_back(
            {Cell{trajectory.times[i]}, Cell{trajectory.positions[i]}});
    table.annotations["waveguide"] = to_string(trajectory.waveguide);
    table.annotations["truncated"] =
        std::string(trajectory.truncated ? "true" : "false");
    return table;
}

Table build_table(const SweepRequest& request) {
    request.validate();
    switch (request.mode) {
        case Mode::Wavefield: return wavefield_table(request);
        case Mode::SpeedCurve: return speed_curve_table(request);
        case Mode::VelocityCurve: return velocity_curve_table(request);
        case Mode::Coefficients: return coefficients_table(request);
        case Mode::Trajectory: return trajectory_table(request);
        case Mode::Verify: break;
    }
    throw std::invalid_argument("build_table: verify mode has no table");
}

namespace {

// x-grid used by the verify sweeps. The offset keeps every grid point
// clear of field zeros for all built-in detunings, so the checked
// identities are evaluated where they are numerically well conditioned.
constexpr double verify_x_start = 0.0137;
constexpr double verify_x_stop = 5.0137;
constexpr int verify_x_points = 200;

struct CheckAccumulator {
    double max_residual = 0.0;
    void feed(double value) { max_residual = std::max(max_residual, std::abs(value)); }
};

}  // namespace

VerifyReport run_verify_checks(const PhysicalConfig& base,
                               bool inject_j0_sign_flip) {
    base.validate();
    const double hbar_J0 = base.hbar * base.coupling;
    const std::vector<double> sweep = {-10.0, -5.0, -2.0, -1.5, -1.001, -1.0,
                                       -0.5,  0.0,  0.5,  0.999, 1.001, 1.5,
                                       2.0,   5.0,  10.0};
    const std::vector<double> grid =
        linspace(verify_x_start, verify_x_stop, verify_x_points);

    VerifyReport report;
    const auto push = [&report](const std::string& name, double max_residual,
                                double tolerance) {
        report.checks.push_back(
            {name, max_residual, tolerance, max_residual <= tolerance});
    };

    // Wavenumber branch identities: k^2 recovers the radicand and
    // k-^2 - k+^2 = 4 m J0 / hbar.
    {
        CheckAccumulator acc;
        const double scale = 2.0 * base.mass / (base.hbar * base.hbar);
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            const double delta = detuning(config);
            const WaveNumbers k = wavenumbers(config);
            const double norm = scale * (std::abs(delta) + hbar_J0);
            acc.feed(std::abs(k.k_plus * k.k_plus - (scale * (delta - hbar_J0))) /
                     norm);
            acc.feed(std::abs(k.k_minus * k.k_minus - (scale * (delta + hbar_J0))) /
                     norm);
            acc.feed(std::abs(k.k_minus * k.k_minus - k.k_plus * k.k_plus -
                              4.0 * base.mass * base.coupling / base.hbar) /
                     (4.0 * base.mass * base.coupling / base.hbar));
        }
        push("wavenumber_branch_identity", acc.max_residual, 1e-12);
    }

    // Stationary coupled equations against the finite-difference oracle.
    {
        CheckAccumulator acc;
        const oracle::GridSpec spec{0.0, 5.0, 256};
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            acc.feed(oracle::stationary_residual(config, spec, Waveguide::Main)
                         .max_abs);
            acc.feed(oracle::stationary_residual(config, spec,
                                                 Waveguide::Auxiliary)
                         .max_abs);
        }
        push("stationary_residual", acc.max_residual, 1e-8);
    }

    // Modified continuity equations (sign hook flips j0 to prove the
    // check can fail).
    {
        CheckAccumulator acc;
        const double sign = inject_j0_sign_flip ? -1.0 : 1.0;
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            for (const double x : grid) {
                const double j0 = tunnelling_current(config, x);
                acc.feed(flux_divergence(config, x, Waveguide::Main) - sign * j0);
                acc.feed(flux_divergence(config, x, Waveguide::Auxiliary) +
                         sign * j0);
            }
        }
        push("continuity_residual", acc.max_residual, 1e-9);
    }

    // Hamilton-Jacobi energy budget at non-node grid points, residual
    // normalized by max(|E|, hbar J0).
    {
        CheckAccumulator acc;
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            const double scale = std::max(std::abs(config.energy), hbar_J0);
            for (const double x : grid) {
                for (const Waveguide wg :
                     {Waveguide::Main, Waveguide::Auxiliary}) {
                    try {
                        acc.feed(hj_residual(config, x, wg) / scale);
                    } catch (const node_error&) {
                    }
                }
            }
        }
        push("hj_residual", acc.max_residual, 1e-8);
    }

    // Evanescent regime: every velocity vanishes.
    {
        CheckAccumulator acc;
        for (const double d : sweep) {
            if (!(d <= -1.0)) continue;
            const PhysicalConfig config = config_at_delta(base, d);
            const double v_scale = std::sqrt(hbar_J0 / base.mass);
            for (const double x : grid) {
                for (const Waveguide wg :
                     {Waveguide::Main, Waveguide::Auxiliary}) {
                    try {
                        acc.feed(bohm_velocity(config, x, wg) / v_scale);
                    } catch (const node_error&) {
                    }
                }
            }
        }
        push("zero_velocity_evanescent", acc.max_residual, 1e-12);
    }

    // Transmission regime: v_m = v_a = hbar(k+ + k-)/2m, x-independent.
    {
        CheckAccumulator acc;
        for (const double d : sweep) {
            if (!(d > 1.0)) continue;
            const PhysicalConfig config = config_at_delta(base, d);
            const WaveNumbers k = wavenumbers(config);
            const double expected = base.hbar *
                                    (k.k_plus.real() + k.k_minus.real()) /
                                    (2.0 * base.mass);
            for (const double x : grid) {
                try {
                    const double v_m = bohm_velocity(config, x, Waveguide::Main);
                    const double v_a =
                        bohm_velocity(config, x, Waveguide::Auxiliary);
                    acc.feed((v_m - v_a) / expected);
                    acc.feed((v_m - expected) / expected);
                    acc.feed((v_a - expected) / expected);
                } catch (const node_error&) {
                }
            }
        }
        push("velocity_equality_transmission", acc.max_residual, 1e-12);
    }

    // Plateau: the semi-classical speed is constant across |Delta| < hbar J0.
    {
        CheckAccumulator acc;
        const double expected = std::sqrt(hbar_J0 / base.mass);
        for (int i = 0; i < 100; ++i) {
            const double d = -1.0 + 2.0 * (i + 0.5) / 100.0;
            const PhysicalConfig config = config_at_delta(base, d);
            acc.feed((semiclassical_speed(config) - expected) / expected);
        }
        push("plateau_constancy", acc.max_residual, 1e-12);
    }

    // Coefficient symmetry under Delta -> -Delta.
    {
        CheckAccumulator acc;
        for (double d = 0.1; d < 10.0; d += 0.35) {
            const double c_pos = rho_a_coefficient(config_at_delta(base, d));
            const double c_neg = rho_a_coefficient(config_at_delta(base, -d));
            acc.feed((c_pos - c_neg) / c_pos);
        }
        push("coefficient_symmetry", acc.max_residual, 1e-12);
    }

    // Both branch formulas agree exactly at the plateau boundary.
    {
        CheckAccumulator acc;
        const double plateau = base.mass * base.coupling / base.hbar;
        for (const double d : {1.0, -1.0}) {
            const PhysicalConfig config = config_at_delta(base, d);
            const double delta = detuning(config);
            const double boundary_formula =
                2.0 * base.mass * base.coupling * base.coupling /
                std::pow(std::sqrt(std::abs(delta + hbar_J0)) +
                             std::sqrt(std::abs(delta - hbar_J0)),
                         2.0);
            acc.feed((boundary_formula - plateau) / plateau);
            acc.feed((rho_a_coefficient(config) - plateau) / plateau);
        }
        push("coefficient_boundary_agreement", acc.max_residual, 1e-12);
    }

    // Closed form vs Bohmian reconstruction vs numeric oracle, pairwise.
    {
        CheckAccumulator acc;
        const double epsilon = default_continuation_epsilon(base);
        for (const double d : canonical_deltas) {
            const PhysicalConfig config = config_at_delta(base, d);
            const CoefficientReport entry = coefficient_report(config, epsilon);
            report.coefficient_table.emplace_back(d, entry);
            const double scale = entry.closed_form;
            acc.feed((entry.closed_form - entry.bohmian) / scale);
            acc.feed((entry.closed_form - entry.oracle) / scale);
            acc.feed((entry.bohmian - entry.oracle) / scale);
        }
        push("coefficient_triple_agreement", acc.max_residual, 1e-4);
    }

    // j0 comes out real from the complex form.
    {
        CheckAccumulator acc;
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            for (const double x : grid) {
                const WaveField f = eval_fields(config, x);
                const std::complex<double> z =
                    std::complex<double>(0.0, -config.coupling) *
                    (f.psi_a * std::conj(f.psi_m) -
                     std::conj(f.psi_a) * f.psi_m);
                const double mag = std::abs(z);
                if (mag > 0.0) acc.feed(z.imag() / mag);
            }
        }
        push("j0_reality", acc.max_residual, 1e-14);
    }

    // Adding both continuity equations: total flux is conserved.
    {
        CheckAccumulator acc;
        const double flux_scale =
            std::norm(base.amplitude) * std::sqrt(hbar_J0 / base.mass);
        for (const double d : sweep) {
            const PhysicalConfig config = config_at_delta(base, d);
            const double reference =
                probability_flux(config, grid.front(), Waveguide::Main) +
                probability_flux(config, grid.front(), Waveguide::Auxiliary);
            for (const double x : grid) {
                const double total =
                    probability_flux(config, x, Waveguide::Main) +
                    probability_flux(config, x, Waveguide::Auxiliary);
                acc.feed((total - reference) / flux_scale);
            }
        }
        push("total_flux_constancy", acc.max_residual, 1e-12);
    }

    report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const VerifyCheck& c) { return c.pass; });
    return report;
}

namespace {

nlohmann::ordered_json verify_report_json(const VerifyReport& report) {
    nlohmann::ordered_json doc;
    doc["all_pass"] = report.all_pass;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const VerifyCheck& check : report.checks) {
        checks.push_back({{"name", check.name},
                          {"max_residual", check.max_residual},
                          {"tolerance", check.tolerance},
                          {"pass", check.pass}});
    }
    doc["checks"] = std::move(checks);
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& [d, entry] : report.coefficient_table) {
        table.push_back({{"delta_over_hJ0", d},
                         {"closed_form", entry.closed_form},
                         {"bohmian", entry.bohmian},
                         {"oracle", entry.oracle},
                         {"regime", to_string(entry.regime)}});
    }
    doc["coefficient_table"] = std::move(table);
    return doc;
}

void write_output(const std::string& path,
                  const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    writer(out);
    if (!out)
        throw std::runtime_error("error while writing output file: " + path);
}

}  // namespace

bool run_verify(const SweepRequest& request, std::ostream& log) {
    const VerifyReport report =
        run_verify_checks(request.config, request.inject_j0_sign_flip);
    for (const VerifyCheck& check : report.checks) {
        log << (check.pass ? "[PASS] " : "[FAIL] ") << check.name
            << ": max residual " << format_double(check.max_residual)
            << " (tolerance " << format_double(check.tolerance) << ")\n";
    }
    log << (report.all_pass ? "verify: all checks passed\n"
                            : "verify: FAILURES detected\n");
    write_output(request.output_path, [&report](std::ostream& out) {
        out << verify_report_json(report).dump(2) << "\n";
    });
    return report.all_pass;
}

int run(const SweepRequest& request, std::ostream& log) {
    request.validate();
    if (request.mode == Mode::Verify)
        return run_verify(request, log) ? 0 : 1;
    const Table table = build_table(request);
    write_output(request.output_path, [&](std::ostream& out) {
        if (request.format == OutputFormat::Csv)
            emit_csv(table, out);
        else
            emit_json(table, out);
    });
    return 0;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid numeric value for key '" + key +
                                    "': " + value);
    }
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
    std::vector<double> list;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) list.push_back(parse_number(key, item));
    }
    if (list.empty())
        throw std::invalid_argument("empty list for key '" + key + "'");
    return list;
}

}  // namespace

Settings parse_settings(std::istream& in) {
    Settings settings;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " +
                                        std::to_string(line_number) +
                                        " is not key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "hbar") settings.hbar = parse_number(key, value);
        else if (key == "mass") settings.mass = parse_number(key, value);
        else if (key == "coupling") settings.coupling = parse_number(key, value);
        else if (key == "step_potential")
            settings.step_potential = parse_number(key, value);
        else if (key == "energy") settings.energy = parse_number(key, value);
        else if (key == "amplitude_re")
            settings.amplitude_re = parse_number(key, value);
        else if (key == "amplitude_im")
            settings.amplitude_im = parse_number(key, value);
        else if (key == "delta") settings.delta = parse_number(key, value);
        else if (key == "x_min") settings.x_min = parse_number(key, value);
        else if (key == "x_max") settings.x_max = parse_number(key, value);
        else if (key == "points")
            settings.points = static_cast<int>(parse_number(key, value));
        else if (key == "delta_min")
            settings.delta_min = parse_number(key, value);
        else if (key == "delta_max")
            settings.delta_max = parse_number(key, value);
        else if (key == "positions") settings.positions = parse_list(key, value);
        else if (key == "out") settings.out = value;
        else if (key == "format") settings.format = value;
        else if (key == "epsilon") settings.epsilon = parse_number(key, value);
        else if (key == "x0") settings.x0 = parse_number(key, value);
        else if (key == "t_end") settings.t_end = parse_number(key, value);
        else if (key == "dt") settings.dt = parse_number(key, value);
        else if (key == "waveguide") settings.waveguide = value;
        else
            throw std::invalid_argument("unknown config key: " + key);
    }
    return settings;
}

Settings parse_settings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_settings(in);
}

Settings merge(Settings base, const Settings& overrides) {
    const auto take = [](auto& dst, const auto& src) {
        if (src.has_value()) dst = src;
    };
    take(base.hbar, overrides.hbar);
    take(base.mass, overrides.mass);
    take(base.coupling, overrides.coupling);
    take(base.step_potential, overrides.step_potential);
    take(base.energy, overrides.energy);
    take(base.amplitude_re, overrides.amplitude_re);
    take(base.amplitude_im, overrides.amplitude_im);
    take(base.delta, overrides.delta);
    take(base.x_min, overrides.x_min);
    take(base.x_max, overrides.x_max);
    take(base.points, overrides.points);
    take(base.delta_min, overrides.delta_min);
    take(base.delta_max, overrides.delta_max);
    take(base.positions, overrides.positions);
    take(base.out, overrides.out);
    take(base.format, overrides.format);
    take(base.epsilon, overrides.epsilon);
    take(base.x0, overrides.x0);
    take(base.t_end, overrides.t_end);
    take(base.dt, overrides.dt);
    take(base.waveguide, overrides.waveguide);
    return base;
}

SweepRequest build_request(const Settings& settings, Mode mode) {
    SweepRequest request;
    request.mode = mode;

    PhysicalConfig& config = request.config;
    if (settings.hbar) config.hbar = *settings.hbar;
    if (settings.mass) config.mass = *settings.mass;
    if (settings.coupling) config.coupling = *settings.coupling;
    if (settings.step_potential) config.step_potential = *settings.step_potential;
    if (settings.energy) config.energy = *settings.energy;
    if (settings.amplitude_re || settings.amplitude_im)
        config.amplitude = {settings.amplitude_re.value_or(1.0),
                            settings.amplitude_im.value_or(0.0)};
    config.validate();
    if (settings.delta) {
        // A requested detuning (in units of hbar*J0) overrides the energy.
        const double hbar_J0 = config.hbar * config.coupling;
        config.energy =
            *settings.delta * hbar_J0 + config.step_potential - hbar_J0;
    }
    config.validate();

    switch (mode) {
        case Mode::Wavefield:
            request.sweep_variable = SweepVariable::X;
            request.start = settings.x_min.value_or(0.0);
            request.stop = settings.x_max.value_or(10.0);
            request.n = settings.points.value_or(500);
            break;
        case Mode::SpeedCurve:
        case Mode::VelocityCurve:
            request.sweep_variable = SweepVariable::Delta;
            request.start = settings.delta_min.value_or(-5.0);
            request.stop = settings.delta_max.value_or(5.0);
            request.n = settings.points.value_or(201);
            break;
        case Mode::Coefficients:
            request.sweep_variable = SweepVariable::Delta;
            if (settings.points) {
                request.start = settings.delta_min.value_or(-5.0);
                request.stop = settings.delta_max.value_or(5.0);
                request.n = *settings.points;
            } else {
                request.n = 0;  // canonical detuning set
            }
            break;
        case Mode::Verify:
        case Mode::Trajectory:
            break;
    }
    if (mode == Mode::VelocityCurve)
        request.fixed_positions =
            settings.positions.value_or(std::vector<double>{5.0, 10.0, 20.0, 40.0});

    request.output_path =
        settings.out.value_or(mode == Mode::Verify ? "verify_report.json" : "-");
    if (settings.format) {
        if (*settings.format == "csv") request.format = OutputFormat::Csv;
        else if (*settings.format == "json") request.format = OutputFormat::Json;
        else
            throw std::invalid_argument("format must be csv or json, got: " +
                                        *settings.format);
    }
    request.epsilon = settings.epsilon.value_or(0.0);
    request.x0 = settings.x0.value_or(1.0);
    request.t_end = settings.t_end.value_or(10.0);
    request.dt = settings.dt.value_or(1e-3);
    if (settings.waveguide) {
        if (*settings.waveguide == "main") request.waveguide = Waveguide::Main;
        else if (*settings.waveguide == "auxiliary" || *settings.waveguide == "aux")
            request.waveguide = Waveguide::Auxiliary;
        else
            throw std::invalid_argument(
                "waveguide must be main or auxiliary, got: " +
                *settings.waveguide);
    }
    request.validate();
    return request;
}

}  // namespace cwt::sweep
