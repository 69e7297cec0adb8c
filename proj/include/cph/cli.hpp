#pragma once

#include <string>
#include <vector>

#include "cph/correction.hpp"
#include "cph/error.hpp"
#include "cph/model.hpp"
#include "cph/oracle.hpp"

namespace cph::cli {

struct ModelConfig {
    MapModel model;
    ServiceMixture service;
};

/// Parses the JSON model format; throws Error(ConfigError) with a diagnostic.
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

/// Two-state MMPP of the figure reproduction with exponential(3) phase and kappa = 2 heavy tail.
ModelConfig figure_config(double kappa = 2.0, double epsilon = 0.01);

/// MIN:MAX:N[:log|:lin]; throws Error(ConfigError).
std::vector<double> parse_grid(const std::string& text);

/// Scientific notation with 12 significant digits.
std::string format_num(double x);

struct Series {
    std::string label;
    std::vector<double> y;
    std::string color;
    bool dashed = false;
};
/// Static line plot with a logarithmic time axis.
std::string render_svg(const std::string& title, const std::vector<double>& x, const std::vector<Series>& series);

/// Statistics comparing both approximations with the exact curve.
struct ErrorStats {
    double max_diff_approx = 0.0;
    double abs_err_corrected_lo = 0.0, abs_err_corrected_hi = 0.0;
    double abs_err_simplified_lo = 0.0, abs_err_simplified_hi = 0.0;
    /// Largest |exact - corrected| / exact over the last tail_points grid points.
    double tail_rel_err = 0.0;
};
ErrorStats error_stats(const std::vector<double>& exact, const std::vector<double>& corrected,
                       const std::vector<double>& simplified, int tail_points = 10);

/// One group of CSV rows: a single state, the sum over states, or the waiting time.
struct Curves {
    std::string label;
    std::vector<double> base, corrected, simplified, exact, simulated, sim_se;
};

/// Per-state curves followed by "total" and "wait".  Exact and simulated columns stay empty unless requested.
std::vector<Curves> compute_curves(const ModelConfig& cfg, const std::vector<double>& grid, bool with_exact,
                                   const SimOptions* sim);

/// Writes the rows of compute_curves; columns t,state,base,corrected,simplified then exact, simulated, sim_se
/// when present.
std::string curves_csv(const std::vector<double>& grid, const std::vector<Curves>& curves);

/// Curves of the figure reproduction: all summed over states.
struct FigureData {
    std::vector<double> grid;
    std::vector<double> base, corrected, simplified, exact;
    double load = 0.0;
    ErrorStats stats;
};
FigureData figure_data(const ModelConfig& cfg, const std::vector<double>& grid);
FigureData figure_data(const ModelConfig& cfg, const std::vector<double>& grid, const std::vector<Curves>& curves);

/// One line per reproduction criterion.
struct CheckResult {
    std::string name;
    double value = 0.0;
    std::string expected;
    bool pass = false;
};
std::vector<CheckResult> figure_checks(const FigureData& fd);

/// Exit code for a library error.
int exit_code(const Error& e);

/// Default figure grid: 200 log-spaced points on [0.01, 50].
std::vector<double> figure_grid();

/// Entry point of the command-line tool; returns the process exit code.
int run(int argc, char** argv);

}  // namespace cph::cli
