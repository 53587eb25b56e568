#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdo/error.hpp"
#include "pdo/experiment.hpp"

namespace {

// "START:STOP:STEPS" -> the three grid fields.
void apply_grid(const std::string& text, pdo::ExperimentSpec& spec) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        text.find(':', second + 1) != std::string::npos) {
        throw pdo::SpecError(
            "\"grid\" must look like START:STOP:STEPS, e.g. 0.05:0.45:400");
    }
    try {
        std::size_t used = 0;
        const std::string start_s = text.substr(0, first);
        const std::string stop_s = text.substr(first + 1,
                                               second - first - 1);
        const std::string steps_s = text.substr(second + 1);
        spec.grid_start = std::stod(start_s, &used);
        if (used != start_s.size()) throw std::invalid_argument(start_s);
        spec.grid_stop = std::stod(stop_s, &used);
        if (used != stop_s.size()) throw std::invalid_argument(stop_s);
        const long long steps = std::stoll(steps_s, &used);
        if (used != steps_s.size() || steps < 1) {
            throw std::invalid_argument(steps_s);
        }
        spec.grid_steps = static_cast<std::size_t>(steps);
    } catch (const std::exception&) {
        throw pdo::SpecError("cannot parse \"grid\" value '" + text + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Pulsed digital oscillator: closed-loop simulation, frequency-law "
        "evaluation, staircase sweeps, topology comparison, and bitstream "
        "spectra."};
    app.get_formatter()->column_width(26);

    std::string mode;
    app.add_option("mode", mode,
                   "linear | simulate | sweep | compare | spectrum")
        ->required();

    std::string spec_path;
    auto* spec_opt = app.add_option(
        "--spec", spec_path, "JSON experiment file; flags override it");

    double f0 = 0.0;
    auto* f0_opt = app.add_option("--f0", f0, "natural frequency [Hz]");
    double rho = 0.0;
    auto* rho_opt = app.add_option("--rho", rho, "damping ratio in [0, 1)");
    double ratio = 0.0;
    auto* ratio_opt =
        app.add_option("--ratio", ratio, "sampling ratio f0/fS");
    double fs = 0.0;
    auto* fs_opt = app.add_option("--fs", fs, "sampling frequency [Hz]")
                       ->excludes(ratio_opt);
    ratio_opt->excludes(fs_opt);

    std::string topology;
    auto* topo_opt =
        app.add_option("--topology", topology, "single | double");
    std::vector<int> taps;
    auto* taps_opt = app.add_option("--taps", taps,
                                    "delay taps, e.g. 1 or 1,2")
                         ->delimiter(',');
    double impulse = 0.0;
    auto* impulse_opt =
        app.add_option("--impulse", impulse, "momentum per unit pulse level");

    std::string grid;
    auto* grid_opt = app.add_option(
        "--grid", grid, "ratio grid START:STOP:STEPS for sweep modes");

    std::size_t transient = 0;
    auto* transient_opt = app.add_option("--transient", transient,
                                         "samples dropped before recording");
    std::size_t measure = 0;
    auto* measure_opt =
        app.add_option("--measure", measure, "samples recorded");

    std::string out;
    auto* out_opt =
        app.add_option("--out", out, "output file (stdout when absent)");
    std::string format;
    auto* format_opt = app.add_option("--format", format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 2;
    }

    pdo::ExperimentSpec spec;
    try {
        if (spec_opt->count() > 0) {
            spec = pdo::load_spec(spec_path);
        }
        if (f0_opt->count() > 0) spec.f0 = f0;
        if (rho_opt->count() > 0) spec.rho = rho;
        if (ratio_opt->count() > 0) {
            spec.ratio = ratio;
            spec.fs.reset();
        }
        if (fs_opt->count() > 0) {
            spec.fs = fs;
            spec.ratio.reset();
        }
        if (topo_opt->count() > 0) {
            spec.topology = topology;
            spec.taps.clear();
        }
        if (taps_opt->count() > 0) spec.taps = taps;
        if (impulse_opt->count() > 0) spec.impulse = impulse;
        if (grid_opt->count() > 0) apply_grid(grid, spec);
        if (transient_opt->count() > 0) spec.transient = transient;
        if (measure_opt->count() > 0) spec.measure = measure;
        if (out_opt->count() > 0) spec.out = out;
        if (format_opt->count() > 0) spec.format = format;
    } catch (const pdo::SpecError& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 2;
    } catch (const pdo::IoError& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 1;
    }
    spec.mode = mode;

    return pdo::run_experiment(spec);
}
