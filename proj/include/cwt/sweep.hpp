#ifndef CWT_SWEEP_HPP
#define CWT_SWEEP_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cwt/bohmian.hpp"
#include "cwt/closed_form.hpp"
#include "cwt/core_model.hpp"

// Sweep generation and file emission behind the CLI.
namespace cwt::sweep {

enum class Mode {
    Wavefield,
    SpeedCurve,
    VelocityCurve,
    Coefficients,
    Verify,
    Trajectory,
};

enum class SweepVariable { X, Delta };

enum class OutputFormat { Csv, Json };

struct SweepRequest {
    Mode mode = Mode::Wavefield;
    PhysicalConfig config;
    SweepVariable sweep_variable = SweepVariable::X;
    double start = 0.0;
    double stop = 10.0;
    int n = 500;
    std::vector<double> fixed_positions;  ///< velocity_curve sample positions
    std::string output_path = "-";        ///< "-" means stdout
    OutputFormat format = OutputFormat::Csv;
    double epsilon = 0.0;  ///< continuation epsilon; 0 selects the default
    double x0 = 1.0;       ///< trajectory start
    Waveguide waveguide = Waveguide::Main;
    double t_end = 10.0;
    double dt = 1e-3;
    bool inject_j0_sign_flip = false;  ///< verify-mode mutation hook

    void validate() const;  ///< throws std::invalid_argument
};

/// A table cell is empty (undefined quantity, e.g. velocity at a node),
/// a number, or a label.
using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::map<std::string, Cell> annotations;  ///< scalar extras (JSON only)
};

/// Numeric cells are printed with 17 significant digits, '.' separator,
/// '\n' line endings; identical requests produce identical bytes.
void emit_csv(const Table& table, std::ostream& out);
void emit_json(const Table& table, std::ostream& out);

/// Builds the table for the request's mode (Verify excluded).
Table build_table(const SweepRequest& request);

Table wavefield_table(const SweepRequest& request);
Table speed_curve_table(const SweepRequest& request);
Table velocity_curve_table(const SweepRequest& request);
Table coefficients_table(const SweepRequest& request);
Table trajectory_table(const SweepRequest& request);

/// Closed-form, Bohmian and numeric-oracle coefficients side by side.
CoefficientReport coefficient_report(const PhysicalConfig& config,
                                     double epsilon);

struct VerifyCheck {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    std::vector<std::pair<double, CoefficientReport>> coefficient_table;
    bool all_pass = false;
};

/// Runs every module invariant over a built-in detuning sweep.
/// `inject_j0_sign_flip` flips the sign of the tunnelling current inside
/// the continuity checks, a mutation hook proving the checks can fail.
VerifyReport run_verify_checks(const PhysicalConfig& config,
                               bool inject_j0_sign_flip = false);

/// Writes the verify report as JSON to request.output_path and a one
/// line per check summary to `log`. Returns report.all_pass.
bool run_verify(const SweepRequest& request, std::ostream& log);

/// Executes the request end to end (table modes and verify), writing to
/// request.output_path ("-" = stdout). Returns the process exit code.
int run(const SweepRequest& request, std::ostream& log);

/// Settings parsed from a flat key=value config file or from flags.
/// Unset fields keep defaults when merged into a SweepRequest.
struct Settings {
    std::optional<double> hbar, mass, coupling, step_potential, energy;
    std::optional<double> amplitude_re, amplitude_im;
    std::optional<double> delta;  ///< overrides energy via E = delta + V0 - hbar*J0
    std::optional<double> x_min, x_max;
    std::optional<int> points;
    std::optional<double> delta_min, delta_max;
    std::optional<std::vector<double>> positions;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<double> epsilon, x0, t_end, dt;
    std::optional<std::string> waveguide;
};

/// Parses "key = value" lines ('#' comments, blank lines allowed).
/// Throws std::invalid_argument naming any unknown key.
Settings parse_settings(std::istream& in);
Settings parse_settings_file(const std::string& path);

/// Field-wise merge; values present in `overrides` win.
Settings merge(Settings base, const Settings& overrides);

/// Builds the validated request for `mode` from merged settings,
/// applying the documented defaults.
SweepRequest build_request(const Settings& settings, Mode mode);

}  // namespace cwt::sweep

#endif  // CWT_SWEEP_HPP
