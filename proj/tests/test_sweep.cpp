#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cwt/sweep.hpp"

using namespace cwt;
using namespace cwt::sweep;

namespace {

std::string csv_of(const Table& table) {
    std::ostringstream out;
    emit_csv(table, out);
    return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, sep)) cells.push_back(cell);
    if (!line.empty() && line.back() == sep) cells.push_back("");
    return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    return lines;
}

SweepRequest request_for(Mode mode, const std::string& config_text = "") {
    std::istringstream in(config_text);
    return build_request(parse_settings(in), mode);
}

}  // namespace

TEST_CASE("defaults: empty input gives the dimensionless mixed-regime config") {
    const SweepRequest request = request_for(Mode::Wavefield);
    CHECK(request.config.hbar == 1.0);
    CHECK(request.config.mass == 1.0);
    CHECK(request.config.coupling == 1.0);
    CHECK(request.config.step_potential == 0.0);
    CHECK(request.config.energy == 0.0);
    CHECK(detuning(request.config) == doctest::Approx(1.0));
    CHECK(classify_regime(detuning(request.config), 1.0) ==
          Regime::MixedTransmissionEvanescent);
    CHECK(request.n == 500);
    CHECK(request.start == 0.0);
    CHECK(request.stop == 10.0);
    CHECK(request.format == OutputFormat::Csv);
}

TEST_CASE("config file values are applied and flags override them") {
    const SweepRequest from_file = request_for(Mode::Wavefield, "energy = 5\n");
    CHECK(detuning(from_file.config) == doctest::Approx(6.0));
    CHECK(classify_regime(detuning(from_file.config), 1.0) ==
          Regime::TwoTransmission);

    std::istringstream file_stream("energy = 5\nx_max = 3\n");
    Settings file_settings = parse_settings(file_stream);
    Settings flags;
    flags.energy = -4.0;
    const SweepRequest merged =
        build_request(merge(file_settings, flags), Mode::Wavefield);
    CHECK(merged.config.energy == -4.0);
    CHECK(merged.stop == 3.0);  // file value survives where no flag given
}

TEST_CASE("config parsing errors name the offender") {
    std::istringstream unknown("frequency = 3\n");
    CHECK_THROWS_WITH_AS(parse_settings(unknown),
                         doctest::Contains("unknown config key: frequency"),
                         std::invalid_argument);

    std::istringstream bad_value("energy = fast\n");
    CHECK_THROWS_AS(parse_settings(bad_value), std::invalid_argument);

    std::istringstream no_eq("energy 3\n");
    CHECK_THROWS_AS(parse_settings(no_eq), std::invalid_argument);

    std::istringstream comments("# only a comment\n\n");
    CHECK_NOTHROW(parse_settings(comments));
}

TEST_CASE("invalid physics values fail request validation") {
    CHECK_THROWS_AS(request_for(Mode::Wavefield, "coupling = -1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(request_for(Mode::Wavefield, "mass = 0\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(request_for(Mode::Wavefield, "format = yaml\n"),
                    std::invalid_argument);
}

TEST_CASE("delta setting overrides the energy") {
    const SweepRequest request = request_for(Mode::Wavefield, "delta = -2\n");
    CHECK(detuning(request.config) == doctest::Approx(-2.0));
    CHECK(request.config.energy == doctest::Approx(-3.0));
}

TEST_CASE("velocity curve rejects an empty position list") {
    SweepRequest request = request_for(Mode::VelocityCurve);
    request.fixed_positions.clear();
    CHECK_THROWS_AS(request.validate(), std::invalid_argument);
    std::istringstream empty_positions("positions = ,\n");
    CHECK_THROWS_AS(parse_settings(empty_positions), std::invalid_argument);
}

TEST_CASE("wavefield table has the pinned header and boundary values") {
    SweepRequest request = request_for(Mode::Wavefield, "delta = 2\n");
    request.n = 100;
    const Table table = wavefield_table(request);
    const std::string csv = csv_of(table);
    const auto lines = lines_of(csv);
    CHECK(lines.front() ==
          "x,re_psi_m,im_psi_m,re_psi_a,im_psi_a,rho_a_raw,rho_a_norm,j0,v_m,v_a");
    CHECK(lines.size() == 101);  // header + rows

    // First row is x=0: psi_m = 1, psi_a = 0, rho = 0, j0 = 0, v_a empty.
    const auto first = split(lines[1], ',');
    REQUIRE(first.size() == 10);
    CHECK(std::stod(first[0]) == 0.0);
    CHECK(std::stod(first[1]) == doctest::Approx(1.0));
    CHECK(std::stod(first[3]) == doctest::Approx(0.0));
    CHECK(std::stod(first[6]) == 0.0);
    CHECK(std::stod(first[7]) == 0.0);
    CHECK(first[9].empty());  // auxiliary velocity undefined at its node
}

TEST_CASE("evanescent wavefield rows decay and carry zero velocities") {
    SweepRequest request = request_for(Mode::Wavefield, "delta = -2\n");
    request.n = 60;
    request.stop = 5.0;
    const Table table = wavefield_table(request);
    double previous = 2.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const double re_m = std::get<double>(table.rows[i][1]);
        const double im_m = std::get<double>(table.rows[i][2]);
        CHECK(std::abs(im_m) == 0.0);
        CHECK(std::abs(re_m) <= previous);
        previous = std::abs(re_m);
        if (i > 0) {
            CHECK(std::get<double>(table.rows[i][8]) == 0.0);  // v_m
            CHECK(std::get<double>(table.rows[i][9]) == 0.0);  // v_a
        }
    }
}

TEST_CASE("mixed wavefield keeps one oscillatory and one decaying mode") {
    SweepRequest request = request_for(Mode::Wavefield, "delta = 0\n");
    request.n = 400;
    request.stop = 20.0;
    const Table table = wavefield_table(request);
    // Late rows: the evanescent part is gone, populations split evenly.
    const auto& late = table.rows.back();
    CHECK(std::get<double>(late[6]) == doctest::Approx(0.5).epsilon(1e-8));
    // Oscillation: re_psi_m changes sign somewhere.
    bool sign_change = false;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        sign_change = sign_change ||
                      (std::get<double>(table.rows[i][1]) *
                           std::get<double>(table.rows[i - 1][1]) <
                       0.0);
    CHECK(sign_change);
}

TEST_CASE("speed curve shows the plateau and the symmetric wings") {
    SweepRequest request = request_for(Mode::SpeedCurve);
    const Table table = speed_curve_table(request);
    CHECK(csv_of(table).rfind("delta_over_hJ0,v_closed_form,"
                              "v_fit_from_samples,v_original_model",
                              0) == 0);
    REQUIRE(table.rows.size() == 201);
    double plateau_min = 1e300, plateau_max = -1e300;
    for (const auto& row : table.rows) {
        const double d = std::get<double>(row[0]);
        const double v_closed = std::get<double>(row[1]);
        const double v_fit = std::get<double>(row[2]);
        const double v_model = std::get<double>(row[3]);
        if (std::abs(d) < 1.0) {
            plateau_min = std::min(plateau_min, v_closed);
            plateau_max = std::max(plateau_max, v_closed);
        }
        CHECK(v_model == doctest::Approx(std::sqrt(2.0 * std::abs(d))));
        CHECK(v_fit == doctest::Approx(v_closed).epsilon(2e-3));
    }
    CHECK(plateau_max - plateau_min <= 1e-12);
    CHECK(plateau_min == doctest::Approx(1.0));

    // Symmetry of the closed form in the detuning.
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& mirrored = table.rows[table.rows.size() - 1 - i];
        CHECK(std::get<double>(table.rows[i][1]) ==
              doctest::Approx(std::get<double>(mirrored[1])).epsilon(1e-12));
    }
}

TEST_CASE("speed curve approaches the original model far from the gap") {
    SweepRequest request = request_for(Mode::SpeedCurve);
    request.start = 999.0;
    request.stop = 1001.0;
    request.n = 3;
    const Table table = speed_curve_table(request);
    for (const auto& row : table.rows) {
        const double ratio =
            std::get<double>(row[1]) / std::get<double>(row[3]);
        CHECK(ratio <= 1.0);
        CHECK(ratio >= 1.0 - 1e-3);
    }
}

TEST_CASE("velocity curve reproduces the three-regime structure") {
    SweepRequest request = request_for(Mode::VelocityCurve);
    request.n = 41;
    const Table table = velocity_curve_table(request);
    CHECK(table.columns ==
          std::vector<std::string>{"delta_over_hJ0", "x", "v_m", "v_a"});
    CHECK(table.rows.size() == 4 * 41);  // grouped by position

    // Rows are grouped: position changes slowest.
    CHECK(std::get<double>(table.rows[0][1]) == 5.0);
    CHECK(std::get<double>(table.rows[40][1]) == 5.0);
    CHECK(std::get<double>(table.rows[41][1]) == 10.0);

    for (const auto& row : table.rows) {
        const double d = std::get<double>(row[0]);
        const bool has_m = std::holds_alternative<double>(row[2]);
        const bool has_a = std::holds_alternative<double>(row[3]);
        if (d < -1.0) {
            // zero where defined; deep tails below the node threshold are empty
            if (has_m) CHECK(std::get<double>(row[2]) == 0.0);
            if (has_a) CHECK(std::get<double>(row[3]) == 0.0);
        } else if (d > 1.0 && has_m && has_a) {
            CHECK(std::get<double>(row[2]) ==
                  doctest::Approx(std::get<double>(row[3])).epsilon(1e-12));
        }
    }

    // Mixed regime: velocities differ and depend on x.
    const auto mixed_row = [&table](double pos, double d) -> const std::vector<Cell>& {
        for (const auto& row : table.rows)
            if (std::get<double>(row[1]) == pos &&
                std::abs(std::get<double>(row[0]) - d) < 1e-12)
                return row;
        throw std::runtime_error("row not found");
    };
    const auto& r5 = mixed_row(5.0, 0.0);
    CHECK(std::get<double>(r5[2]) != std::get<double>(r5[3]));

    // Transmission velocities are identical across positions.
    const auto& t5 = mixed_row(5.0, 2.0);
    const auto& t40 = mixed_row(40.0, 2.0);
    CHECK(std::get<double>(t5[2]) ==
          doctest::Approx(std::get<double>(t40[2])).epsilon(1e-12));
}

TEST_CASE("coefficients table spans the canonical detunings with 3-way agreement") {
    const SweepRequest request = request_for(Mode::Coefficients);
    const Table table = coefficients_table(request);
    CHECK(table.columns == std::vector<std::string>{"delta_over_hJ0",
                                                    "c_closed_form", "c_bohmian",
                                                    "c_oracle", "regime"});
    REQUIRE(table.rows.size() == 9);
    for (const auto& row : table.rows) {
        const double closed = std::get<double>(row[1]);
        const double bohm = std::get<double>(row[2]);
        const double oracle_value = std::get<double>(row[3]);
        CHECK(std::abs(bohm - closed) <= 1e-4 * closed);
        CHECK(std::abs(oracle_value - closed) <= 1e-4 * closed);
        const std::string regime = std::get<std::string>(row[4]);
        CHECK((regime == "two_transmission" || regime == "mixed" ||
               regime == "two_evanescent"));
    }
}

TEST_CASE("trajectory table records the walk and its metadata") {
    SweepRequest request = request_for(Mode::Trajectory, "delta = 1.5\n");
    request.x0 = 0.2;
    request.t_end = 1.0;
    request.dt = 0.05;
    const Table table = trajectory_table(request);
    CHECK(table.columns == std::vector<std::string>{"t", "x"});
    CHECK(table.rows.size() == 21);
    CHECK(std::get<std::string>(table.annotations.at("truncated")) == "false");
    CHECK(std::get<std::string>(table.annotations.at("waveguide")) == "main");
}

TEST_CASE("csv emission is deterministic and byte-identical across runs") {
    SweepRequest request = request_for(Mode::Wavefield, "delta = 0.7\n");
    request.n = 50;
    const std::string first = csv_of(build_table(request));
    const std::string second = csv_of(build_table(request));
    CHECK(first == second);
    // 17 significant digits survive a round trip.
    const auto lines = lines_of(first);
    const auto cells = split(lines[2], ',');
    const double x = std::stod(cells[0]);
    std::ostringstream roundtrip;
    emit_csv(build_table(request), roundtrip);
    CHECK(std::stod(split(lines_of(roundtrip.str())[2], ',')[0]) == x);
}

TEST_CASE("json emission carries the same table") {
    SweepRequest request = request_for(Mode::Wavefield, "delta = -2\n");
    request.n = 20;
    request.format = OutputFormat::Json;
    std::ostringstream out;
    emit_json(build_table(request), out);
    const std::string text = out.str();
    CHECK(text.find("\"columns\"") != std::string::npos);
    CHECK(text.find("\"rho_a_norm\"") != std::string::npos);
    CHECK(text.find("\"rows\"") != std::string::npos);
    // x=0 row holds a null velocity cell for the auxiliary waveguide.
    CHECK(text.find("null") != std::string::npos);
}

TEST_CASE("run writes the requested file and fails on bad paths") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cwt_sweep_test";
    fs::create_directories(dir);
    SweepRequest request = request_for(Mode::Wavefield, "delta = 2\n");
    request.n = 10;
    request.output_path = (dir / "wavefield.csv").string();
    std::ostringstream log;
    CHECK(run(request, log) == 0);
    CHECK(fs::exists(request.output_path));

    request.output_path = (dir / "missing_dir" / "wavefield.csv").string();
    CHECK_THROWS_WITH_AS(run(request, log), doctest::Contains("missing_dir"),
                         std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("verify passes on the correct build and reports all checks") {
    namespace fs = std::filesystem;
    const fs::path report_path =
        fs::temp_directory_path() / "cwt_verify_report.json";
    SweepRequest request = request_for(Mode::Verify);
    request.output_path = report_path.string();
    std::ostringstream log;
    CHECK(run(request, log) == 0);
    CHECK(log.str().find("[FAIL]") == std::string::npos);

    std::ifstream in(report_path);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string report = buffer.str();
    CHECK(report.find("\"all_pass\": true") != std::string::npos);
    CHECK(report.find("coefficient_table") != std::string::npos);
    CHECK(report.find("stationary_residual") != std::string::npos);
    fs::remove(report_path);
}

TEST_CASE("verify mutation hook: flipping j0 breaks the continuity check") {
    const VerifyReport report = run_verify_checks(PhysicalConfig{}, true);
    CHECK_FALSE(report.all_pass);
    bool continuity_failed = false;
    for (const VerifyCheck& check : report.checks)
        if (check.name == "continuity_residual") continuity_failed = !check.pass;
    CHECK(continuity_failed);
}
