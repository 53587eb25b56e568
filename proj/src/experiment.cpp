#include "pdo/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdo/error.hpp"
#include "pdo/io.hpp"

namespace pdo {

namespace {

using nlohmann::ordered_json;

constexpr int kMaxDetectPeriod = 64;

double as_double(const std::string& key, const ordered_json& v) {
    if (!v.is_number()) {
        throw SpecError("key \"" + key + "\" must be a number");
    }
    return v.get<double>();
}

std::size_t as_count(const std::string& key, const ordered_json& v) {
    if (!v.is_number_unsigned()) {
        throw SpecError("key \"" + key +
                        "\" must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

int as_int(const std::string& key, const ordered_json& v) {
    if (!v.is_number_integer()) {
        throw SpecError("key \"" + key + "\" must be an integer");
    }
    return v.get<int>();
}

std::string as_string(const std::string& key, const ordered_json& v) {
    if (!v.is_string()) {
        throw SpecError("key \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

std::vector<int> as_taps(const std::string& key, const ordered_json& v) {
    if (!v.is_array() || v.empty() || v.size() > 2) {
        throw SpecError("key \"" + key +
                        "\" must be an array of one or two integers");
    }
    std::vector<int> taps;
    for (const auto& e : v) {
        taps.push_back(as_int(key, e));
    }
    return taps;
}

bool one_of(const std::string& value, std::initializer_list<const char*> set) {
    for (const char* s : set) {
        if (value == s) {
            return true;
        }
    }
    return false;
}

Estimator estimator_from(const ExperimentSpec& spec) {
    return spec.estimator == "spectrum" ? Estimator::Spectrum
                                        : Estimator::Transitions;
}

Window window_from(const ExperimentSpec& spec) {
    return spec.window == "hann" ? Window::Hann : Window::Rectangular;
}

std::vector<double> grid_from(const ExperimentSpec& spec) {
    return ratio_grid(*spec.grid_start, *spec.grid_stop, *spec.grid_steps);
}

std::string linear_csv(const ExperimentSpec& spec) {
    const double rho = spec.rho.value_or(0.0);
    std::string out = "r,fd\n";
    for (double r : grid_from(spec)) {
        out += format_double(r);
        out += ',';
        out += format_double(linear_fd(r, rho));
        out += '\n';
    }
    return out;
}

std::string linear_json(const ExperimentSpec& spec) {
    const double rho = spec.rho.value_or(0.0);
    ordered_json doc;
    doc["rho"] = rho;
    doc["points"] = ordered_json::array();
    for (double r : grid_from(spec)) {
        doc["points"].push_back({{"r", r}, {"fd", linear_fd(r, rho)}});
    }
    return doc.dump(2) + "\n";
}

ordered_json ledger_json(const EnergyLedger& ledger) {
    return ordered_json{{"injected", ledger.injected_total},
                        {"dissipated", ledger.dissipated_total},
                        {"initial", ledger.initial_energy},
                        {"final", ledger.final_energy},
                        {"residual", ledger.balance_residual()}};
}

std::string summary_json(const SimConfig& config, const SimTrace& trace) {
    ordered_json doc;
    doc["fd_est"] = estimate_fd_transitions(trace.bits);
    doc["sample_rate"] = config.sample_rate();

    std::optional<PeriodInfo> bits = detect_period(trace.bits,
                                                   kMaxDetectPeriod);
    doc["period"] = bits ? ordered_json(bits->period) : ordered_json(nullptr);
    doc["pattern"] =
        bits ? ordered_json(bits->pattern) : ordered_json(nullptr);

    std::optional<PeriodInfo> levels =
        detect_period(std::span<const int>(trace.pulse_levels),
                      kMaxDetectPeriod);
    doc["level_period"] =
        levels ? ordered_json(levels->period) : ordered_json(nullptr);
    doc["level_pattern"] =
        levels ? ordered_json(levels->pattern) : ordered_json(nullptr);

    doc["energy"] = ledger_json(trace.ledger);
    return doc.dump(2) + "\n";
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SpecError("config must be a JSON object");
    }

    ExperimentSpec spec;
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode") {
            spec.mode = as_string(key, value);
        } else if (key == "f0") {
            spec.f0 = as_double(key, value);
        } else if (key == "rho") {
            spec.rho = as_double(key, value);
        } else if (key == "mass") {
            spec.mass = as_double(key, value);
        } else if (key == "k") {
            spec.k = as_double(key, value);
        } else if (key == "b") {
            spec.b = as_double(key, value);
        } else if (key == "topology") {
            spec.topology = as_string(key, value);
        } else if (key == "taps") {
            spec.taps = as_taps(key, value);
        } else if (key == "impulse") {
            spec.impulse = as_double(key, value);
        } else if (key == "polarity") {
            spec.polarity = as_int(key, value);
        } else if (key == "ratio") {
            spec.ratio = as_double(key, value);
        } else if (key == "fs") {
            spec.fs = as_double(key, value);
        } else if (key == "grid_start") {
            spec.grid_start = as_double(key, value);
        } else if (key == "grid_stop") {
            spec.grid_stop = as_double(key, value);
        } else if (key == "grid_steps") {
            spec.grid_steps = as_count(key, value);
        } else if (key == "transient") {
            spec.transient = as_count(key, value);
        } else if (key == "measure") {
            spec.measure = as_count(key, value);
        } else if (key == "initial_x") {
            spec.initial_x = as_double(key, value);
        } else if (key == "initial_v") {
            spec.initial_v = as_double(key, value);
        } else if (key == "estimator") {
            spec.estimator = as_string(key, value);
        } else if (key == "window") {
            spec.window = as_string(key, value);
        } else if (key == "out") {
            spec.out = as_string(key, value);
        } else if (key == "format") {
            spec.format = as_string(key, value);
        } else {
            throw SpecError("unknown key \"" + key + "\"");
        }
    }
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read spec file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string serialize_spec(const ExperimentSpec& spec) {
    ordered_json doc;
    doc["mode"] = spec.mode;
    if (spec.f0) doc["f0"] = *spec.f0;
    if (spec.rho) doc["rho"] = *spec.rho;
    if (spec.mass) doc["mass"] = *spec.mass;
    if (spec.k) doc["k"] = *spec.k;
    if (spec.b) doc["b"] = *spec.b;
    doc["topology"] = spec.topology;
    if (!spec.taps.empty()) doc["taps"] = spec.taps;
    doc["impulse"] = spec.impulse;
    doc["polarity"] = spec.polarity;
    if (spec.ratio) doc["ratio"] = *spec.ratio;
    if (spec.fs) doc["fs"] = *spec.fs;
    if (spec.grid_start) doc["grid_start"] = *spec.grid_start;
    if (spec.grid_stop) doc["grid_stop"] = *spec.grid_stop;
    if (spec.grid_steps) doc["grid_steps"] = *spec.grid_steps;
    doc["transient"] = spec.transient;
    doc["measure"] = spec.measure;
    doc["initial_x"] = spec.initial_x;
    doc["initial_v"] = spec.initial_v;
    doc["estimator"] = spec.estimator;
    doc["window"] = spec.window;
    if (spec.out) doc["out"] = *spec.out;
    doc["format"] = spec.format;
    return doc.dump(2) + "\n";
}

void validate_spec(const ExperimentSpec& spec) {
    if (!one_of(spec.mode,
                {"linear", "simulate", "sweep", "compare", "spectrum"})) {
        throw SpecError(
            "\"mode\" must be one of linear, simulate, sweep, compare, "
            "spectrum");
    }

    const bool physical =
        spec.mass.has_value() || spec.k.has_value() || spec.b.has_value();
    if (physical) {
        if (spec.f0 || spec.rho) {
            throw SpecError(
                "give either \"f0\"/\"rho\" or \"mass\"/\"k\"/\"b\", not "
                "both");
        }
        if (!(spec.mass && spec.k && spec.b)) {
            throw SpecError(
                "physical resonators need all of \"mass\", \"k\", \"b\"");
        }
    }
    if (spec.rho && !(*spec.rho >= 0.0 && *spec.rho < 1.0)) {
        throw SpecError("\"rho\" must lie in [0, 1) (underdamped)");
    }
    if (spec.f0 && !(*spec.f0 > 0.0)) {
        throw SpecError("\"f0\" must be > 0");
    }

    if (!one_of(spec.topology, {"single", "double"})) {
        throw SpecError("\"topology\" must be single or double");
    }
    const std::size_t want_taps = spec.topology == "double" ? 2u : 1u;
    if (!spec.taps.empty() && spec.taps.size() != want_taps) {
        throw SpecError("\"taps\" must list " + std::to_string(want_taps) +
                        " delay(s) for topology " + spec.topology);
    }
    if (spec.polarity != 1 && spec.polarity != -1) {
        throw SpecError("\"polarity\" must be +1 or -1");
    }
    if (!(spec.impulse >= 0.0) || !std::isfinite(spec.impulse)) {
        throw SpecError("\"impulse\" must be finite and >= 0");
    }

    if (spec.ratio && spec.fs) {
        throw SpecError("\"ratio\" and \"fs\" are mutually exclusive");
    }
    if (spec.ratio && !(*spec.ratio > 0.0)) {
        throw SpecError("\"ratio\" must be > 0");
    }
    if (spec.fs && !(*spec.fs > 0.0)) {
        throw SpecError("\"fs\" must be > 0");
    }

    const bool wants_grid = one_of(spec.mode, {"linear", "sweep", "compare"});
    const bool has_grid_part =
        spec.grid_start || spec.grid_stop || spec.grid_steps;
    if (wants_grid) {
        if (!(spec.grid_start && spec.grid_stop && spec.grid_steps)) {
            throw SpecError("mode " + spec.mode +
                            " needs the full \"grid\" (start:stop:steps)");
        }
        if (!(*spec.grid_start > 0.0) || !(*spec.grid_stop > 0.0)) {
            throw SpecError("\"grid\" ratios must be > 0");
        }
        if (*spec.grid_steps < 1) {
            throw SpecError("\"grid\" needs at least one step");
        }
    } else {
        if (has_grid_part) {
            throw SpecError("\"grid\" applies only to linear, sweep, "
                            "compare");
        }
        if (!spec.ratio && !spec.fs) {
            throw SpecError("mode " + spec.mode +
                            " needs \"ratio\" or \"fs\"");
        }
    }

    if (spec.measure < 2) {
        throw SpecError("\"measure\" must be at least 2 samples");
    }
    if (!std::isfinite(spec.initial_x) || !std::isfinite(spec.initial_v)) {
        throw SpecError("\"initial_x\"/\"initial_v\" must be finite");
    }

    if (!one_of(spec.estimator, {"transitions", "spectrum"})) {
        throw SpecError("\"estimator\" must be transitions or spectrum");
    }
    if (!one_of(spec.window, {"rect", "hann"})) {
        throw SpecError("\"window\" must be rect or hann");
    }
    if (!one_of(spec.format, {"csv", "json"})) {
        throw SpecError("\"format\" must be csv or json");
    }
}

SimConfig sim_config_from(const ExperimentSpec& spec) {
    SimConfig config;
    if (spec.mass) {
        config.resonator = params_from_physical(*spec.mass, *spec.k, *spec.b);
    } else {
        config.resonator =
            ResonatorParams(spec.f0.value_or(1.0), spec.rho.value_or(0.0));
    }

    if (spec.topology == "double") {
        const int t1 = spec.taps.empty() ? 1 : spec.taps[0];
        const int t2 = spec.taps.empty() ? 2 : spec.taps[1];
        config.feedback.topology = Topology::double_feedback(t1, t2);
    } else {
        config.feedback.topology =
            Topology::single(spec.taps.empty() ? 1 : spec.taps[0]);
    }
    config.feedback.impulse = spec.impulse;
    config.feedback.polarity = spec.polarity;

    if (spec.ratio) {
        config.ratio = *spec.ratio;
    } else if (spec.fs) {
        config.ratio = config.resonator.f0() / *spec.fs;
    } else {
        config.ratio = spec.grid_start.value_or(config.ratio);
    }

    config.transient_samples = spec.transient;
    config.measure_samples = spec.measure;
    config.initial_state = SimState{spec.initial_x, spec.initial_v, 0.0};
    return config;
}

std::string execute(const ExperimentSpec& spec) {
    const bool json = spec.format == "json";

    if (spec.mode == "linear") {
        return json ? linear_json(spec) : linear_csv(spec);
    }
    if (spec.mode == "simulate") {
        const SimConfig config = sim_config_from(spec);
        const SimTrace trace = run(config);
        return json ? summary_json(config, trace) : trace_csv(trace);
    }
    if (spec.mode == "sweep") {
        const SweepResult result =
            staircase_sweep(grid_from(spec), sim_config_from(spec),
                            estimator_from(spec));
        return json ? sweep_json(result) : sweep_csv(result);
    }
    if (spec.mode == "compare") {
        const TopologyComparison comparison =
            compare_topologies(grid_from(spec), sim_config_from(spec),
                               estimator_from(spec));
        return json ? comparison_json(comparison)
                    : comparison_csv(comparison);
    }
    // spectrum: validated modes leave no other possibility.
    const SimTrace trace = run(sim_config_from(spec));
    const SpectrumResult result = spectrum(trace.bits, window_from(spec));
    return json ? spectrum_json(result) : spectrum_csv(result);
}

int run_experiment(const ExperimentSpec& spec) {
    try {
        validate_spec(spec);
    } catch (const SpecError& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 2;
    }
    try {
        const std::string artifact = execute(spec);
        if (spec.out) {
            write_file(*spec.out, artifact);
        } else {
            std::fwrite(artifact.data(), 1, artifact.size(), stdout);
        }
        return 0;
    } catch (const SpecError& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 2;
    } catch (const InvalidParameter& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pdo: %s\n", e.what());
        return 1;
    }
}

}  // namespace pdo
