#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdo/analysis.hpp"
#include "pdo/sim.hpp"

namespace pdo {

/// Everything one tool invocation needs, as plain data. Mirrors the flat
/// JSON config schema one to one; the CLI fills the same fields from flags,
/// with flags overriding file values.
struct ExperimentSpec {
    std::string mode;  ///< linear | simulate | sweep | compare | spectrum

    // Resonator: either (f0 [+ rho]) or the physical triple (mass, k, b).
    std::optional<double> f0;
    std::optional<double> rho;
    std::optional<double> mass;
    std::optional<double> k;
    std::optional<double> b;

    // Feedback.
    std::string topology = "single";  ///< single | double
    std::vector<int> taps;            ///< defaults: {1} single, {1,2} double
    double impulse = 1e-3;
    int polarity = -1;

    // Sampling: a fixed point (ratio | fs) or a grid for sweep modes.
    std::optional<double> ratio;
    std::optional<double> fs;
    std::optional<double> grid_start;
    std::optional<double> grid_stop;
    std::optional<std::size_t> grid_steps;

    // Run windows and seed state.
    std::size_t transient = 2048;
    std::size_t measure = 8192;
    double initial_x = 1e-6;
    double initial_v = 0.0;

    // Analysis choices.
    std::string estimator = "transitions";  ///< transitions | spectrum
    std::string window = "rect";            ///< rect | hann

    // Output.
    std::optional<std::string> out;  ///< file path; stdout when absent
    std::string format = "csv";      ///< csv | json

    bool operator==(const ExperimentSpec&) const = default;
};

/// Parses the flat JSON object in `text`. Unknown keys, wrong types, and
/// contradictions (ratio and fs together, f0/rho mixed with mass/k/b) all
/// throw SpecError naming the offending key.
ExperimentSpec parse_spec(const std::string& text);

/// Reads the file and hands it to parse_spec. Missing or unreadable files
/// throw IoError, malformed contents SpecError.
ExperimentSpec load_spec(const std::string& path);

/// The experiment spec as a flat JSON object; parse_spec(serialize_spec(s)) == s.
std::string serialize_spec(const ExperimentSpec& spec);

/// Cross-field validation shared by the file and flag paths. Throws
/// SpecError naming the first violated field.
void validate_spec(const ExperimentSpec& spec);

/// Builds the closed-loop configuration a validated spec describes. Modes
/// that sweep the ratio leave `ratio` at the grid start.
SimConfig sim_config_from(const ExperimentSpec& spec);

/// Runs the experiment and returns the rendered artifact (CSV or JSON per
/// spec.format). The caller decides whether it goes to a file or stdout.
std::string execute(const ExperimentSpec& spec);

/// Full tool entry: validate, execute, and deliver to spec.out or stdout.
/// Returns the process exit code (0 ok, 1 runtime failure, 2 bad spec) and
/// prints diagnostics for nonzero results to stderr.
int run_experiment(const ExperimentSpec& spec);

}  // namespace pdo
