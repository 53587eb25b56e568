#include "doctest.h"

#include "pdo/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "pdo/error.hpp"

using namespace pdo;

namespace {

ExperimentSpec minimal_simulate() {
    ExperimentSpec spec;
    spec.mode = "simulate";
    spec.f0 = 1.0;
    spec.rho = 0.0;
    spec.ratio = 0.25;
    spec.taps = {1};
    spec.impulse = 0.01;
    return spec;
}

bool message_mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("the minimal config example is valid") {
    const std::string text = R"({
        "mode": "simulate",
        "f0": 1.0,
        "rho": 0.0,
        "ratio": 0.25,
        "topology": "single",
        "taps": [1],
        "impulse": 0.01
    })";
    const ExperimentSpec spec = parse_spec(text);
    CHECK(spec.mode == "simulate");
    CHECK(spec.f0 == 1.0);
    CHECK(spec.ratio == 0.25);
    CHECK(spec.taps == std::vector<int>{1});
    CHECK(spec.impulse == 0.01);
    CHECK_NOTHROW(validate_spec(spec));

    // untouched keys keep their defaults
    CHECK(spec.polarity == -1);
    CHECK(spec.transient == 2048);
    CHECK(spec.measure == 8192);
    CHECK(spec.estimator == "transitions");
    CHECK(spec.format == "csv");
}

TEST_CASE("parse errors name the offending key") {
    CHECK_THROWS_AS(parse_spec("not json"), SpecError);
    CHECK_THROWS_AS(parse_spec("[1,2]"), SpecError);

    try {
        parse_spec(R"({"mode": "simulate", "raito": 0.25})");
        FAIL("unknown key accepted");
    } catch (const SpecError& e) {
        CHECK(message_mentions(e, "raito"));
    }

    try {
        parse_spec(R"({"mode": "simulate", "rho": "small"})");
        FAIL("wrong type accepted");
    } catch (const SpecError& e) {
        CHECK(message_mentions(e, "rho"));
    }

    try {
        parse_spec(R"({"taps": [1, 2, 3]})");
        FAIL("three taps accepted");
    } catch (const SpecError& e) {
        CHECK(message_mentions(e, "taps"));
    }
}

TEST_CASE("validation names the field that breaks") {
    ExperimentSpec spec = minimal_simulate();

    spec.rho = 1.2;
    try {
        validate_spec(spec);
        FAIL("rho out of range accepted");
    } catch (const SpecError& e) {
        CHECK(message_mentions(e, "rho"));
    }
    spec.rho = 0.0;

    spec.fs = 4.0;  // alongside ratio
    try {
        validate_spec(spec);
        FAIL("ratio and fs together accepted");
    } catch (const SpecError& e) {
        CHECK(message_mentions(e, "ratio"));
        CHECK(message_mentions(e, "fs"));
    }
    spec.fs.reset();

    spec.mode = "oscillate";
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.mode = "simulate";

    spec.mass = 1.0;  // partial physical triple, and f0 already set
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.f0.reset();
    spec.rho.reset();
    CHECK_THROWS_AS(validate_spec(spec), SpecError);  // still missing k, b
    spec.k = 39.478;
    spec.b = 0.0;
    CHECK_NOTHROW(validate_spec(spec));
    spec.mass.reset();
    spec.k.reset();
    spec.b.reset();
    spec.f0 = 1.0;

    spec.polarity = 2;
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.polarity = 1;

    spec.taps = {1, 2};  // two taps on a single topology
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.topology = "double";
    CHECK_NOTHROW(validate_spec(spec));
    spec.taps = {3};
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.topology = "single";

    spec.taps.clear();
    spec.measure = 1;
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.measure = 8192;

    spec.estimator = "wavelet";
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.estimator = "spectrum";
    spec.window = "blackman";
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.window = "hann";
    spec.format = "xml";
    CHECK_THROWS_AS(validate_spec(spec), SpecError);
    spec.format = "json";
    CHECK_NOTHROW(validate_spec(spec));
}

TEST_CASE("grid rules depend on the mode") {
    ExperimentSpec sweep;
    sweep.mode = "sweep";
    sweep.rho = 0.0;
    CHECK_THROWS_AS(validate_spec(sweep), SpecError);  // no grid

    sweep.grid_start = 0.05;
    sweep.grid_stop = 0.45;
    sweep.grid_steps = 9;
    CHECK_NOTHROW(validate_spec(sweep));

    sweep.grid_steps = 0;
    CHECK_THROWS_AS(validate_spec(sweep), SpecError);
    sweep.grid_steps = 9;

    // a fixed-point mode must not carry a grid
    ExperimentSpec sim = minimal_simulate();
    sim.grid_start = 0.05;
    sim.grid_stop = 0.45;
    sim.grid_steps = 9;
    CHECK_THROWS_AS(validate_spec(sim), SpecError);

    // and a grid mode accepts no stray ratio requirement
    ExperimentSpec lin;
    lin.mode = "linear";
    lin.grid_start = 0.01;
    lin.grid_stop = 0.49;
    lin.grid_steps = 25;
    CHECK_NOTHROW(validate_spec(lin));
}

TEST_CASE("specs round-trip through serialize and parse") {
    ExperimentSpec a = minimal_simulate();
    a.out = "trace.csv";
    a.format = "json";
    CHECK(parse_spec(serialize_spec(a)) == a);

    ExperimentSpec b;
    b.mode = "compare";
    b.rho = 0.05;
    b.grid_start = 0.40;
    b.grid_stop = 0.48;
    b.grid_steps = 33;
    b.topology = "double";
    b.taps = {1, 2};
    b.polarity = 1;
    b.estimator = "spectrum";
    CHECK(parse_spec(serialize_spec(b)) == b);

    ExperimentSpec c;
    c.mode = "spectrum";
    c.mass = 2.0;
    c.k = 128.0;
    c.b = 0.04;
    c.fs = 12.5;
    c.window = "hann";
    CHECK(parse_spec(serialize_spec(c)) == c);
}

TEST_CASE("sim_config_from translates every field") {
    ExperimentSpec spec = minimal_simulate();
    spec.rho = 0.05;
    spec.impulse = 2e-3;
    spec.polarity = 1;
    spec.transient = 100;
    spec.measure = 200;
    spec.initial_x = 0.5;
    spec.initial_v = -0.25;

    const SimConfig config = sim_config_from(spec);
    CHECK(config.resonator.f0() == 1.0);
    CHECK(config.resonator.rho() == 0.05);
    CHECK(config.ratio == 0.25);
    CHECK(config.feedback.impulse == 2e-3);
    CHECK(config.feedback.polarity == 1);
    CHECK(config.transient_samples == 100);
    CHECK(config.measure_samples == 200);
    CHECK(config.initial_state.x == 0.5);
    CHECK(config.initial_state.v == -0.25);
    CHECK_FALSE(config.feedback.topology.is_double());

    // fs is translated into the equivalent ratio
    spec.ratio.reset();
    spec.fs = 4.0;
    CHECK(sim_config_from(spec).ratio == doctest::Approx(0.25).epsilon(1e-15));

    // the physical triple reaches the resonator
    ExperimentSpec phys;
    phys.mode = "simulate";
    phys.mass = 2.0;
    phys.k = 2.0;
    phys.b = 0.0;
    phys.ratio = 0.25;
    const SimConfig pconfig = sim_config_from(phys);
    CHECK(pconfig.resonator.mass() == 2.0);
    CHECK(pconfig.resonator.stiffness() == doctest::Approx(2.0));
    CHECK(pconfig.resonator.rho() == 0.0);

    // double topology with default taps
    ExperimentSpec dbl = minimal_simulate();
    dbl.topology = "double";
    dbl.taps.clear();
    const SimConfig dconfig = sim_config_from(dbl);
    CHECK(dconfig.feedback.topology.is_double());
    CHECK(dconfig.feedback.topology.tap1() == 1);
    CHECK(dconfig.feedback.topology.tap2() == 2);
}

TEST_CASE("linear mode renders the law over the grid") {
    ExperimentSpec spec;
    spec.mode = "linear";
    spec.rho = 0.0;
    spec.grid_start = 0.1;
    spec.grid_stop = 0.4;
    spec.grid_steps = 4;

    const std::string csv = execute(spec);
    CHECK(csv.rfind("r,fd\n", 0) == 0);
    // with no damping the law is the identity below one half
    CHECK(csv.find("0.1,0.1\n") != std::string::npos);
    CHECK(csv.find("0.2,0.2\n") != std::string::npos);
    CHECK(csv.find("0.4,0.4\n") != std::string::npos);

    spec.format = "json";
    const nlohmann::json doc = nlohmann::json::parse(execute(spec));
    CHECK(doc["rho"].get<double>() == 0.0);
    REQUIRE(doc["points"].size() == 4);
    CHECK(doc["points"][2]["r"].get<double>() == doctest::Approx(0.3));
    CHECK(doc["points"][2]["fd"].get<double>() == doctest::Approx(0.3));
}

TEST_CASE("simulate mode summarizes the locked quarter-ratio loop") {
    ExperimentSpec spec = minimal_simulate();
    spec.rho = 1e-3;
    spec.impulse = 1e-3;
    spec.format = "json";

    const nlohmann::json doc = nlohmann::json::parse(execute(spec));
    CHECK(doc["fd_est"].get<double>() == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(doc["period"].get<int>() == 4);
    const std::string pattern = doc["pattern"].get<std::string>();
    CHECK(is_rotation(pattern, "1100"));
    CHECK(doc["sample_rate"].get<double>() == doctest::Approx(4.0));
    CHECK(doc["energy"]["injected"].get<double>() > 0.0);

    spec.format = "csv";
    const std::string csv = execute(spec);
    CHECK(csv.rfind("n,x,v,bit,level\n", 0) == 0);
    // one row per measured sample plus the header
    const std::size_t rows =
        static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == spec.measure + 1);
}

TEST_CASE("sweep and compare modes render their artifacts") {
    ExperimentSpec spec;
    spec.mode = "sweep";
    spec.rho = 0.0;
    spec.grid_start = 0.1;
    spec.grid_stop = 0.3;
    spec.grid_steps = 3;
    spec.transient = 512;
    spec.measure = 2048;

    const std::string csv = execute(spec);
    CHECK(csv.rfind("r,fd_est,fd_linear,deviation\n", 0) == 0);

    spec.mode = "compare";
    spec.rho = 0.05;
    spec.polarity = 1;
    spec.estimator = "spectrum";
    spec.grid_start = 0.40;
    spec.grid_stop = 0.48;
    spec.grid_steps = 9;
    spec.transient = 2048;
    spec.measure = 8192;
    spec.format = "json";
    const nlohmann::json doc = nlohmann::json::parse(execute(spec));
    CHECK(doc["mean_dev_double"].get<double>() <
          doc["mean_dev_single"].get<double>());
    CHECK(doc["points"].size() == 9);
}

TEST_CASE("spectrum mode names the locked tone") {
    ExperimentSpec spec = minimal_simulate();
    spec.mode = "spectrum";
    spec.rho = 1e-3;
    spec.format = "json";
    const nlohmann::json doc = nlohmann::json::parse(execute(spec));
    CHECK(doc["peak_freq_norm"].get<double>() ==
          doctest::Approx(0.25).epsilon(1e-6));

    spec.format = "csv";
    const std::string csv = execute(spec);
    CHECK(csv.rfind("freq_norm,freq_hz,magnitude\n", 0) == 0);
}

TEST_CASE("run_experiment returns contract exit codes") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pdo_experiment_test";
    fs::create_directories(dir);

    ExperimentSpec bad = minimal_simulate();
    bad.rho = 1.5;
    CHECK(run_experiment(bad) == 2);

    ExperimentSpec blocked = minimal_simulate();
    blocked.transient = 16;
    blocked.measure = 16;
    blocked.out = (dir / "no_such_dir" / "x.csv").string();
    CHECK(run_experiment(blocked) == 1);

    ExperimentSpec good = minimal_simulate();
    good.transient = 16;
    good.measure = 16;
    good.out = (dir / "trace.csv").string();
    CHECK(run_experiment(good) == 0);
    CHECK(fs::exists(dir / "trace.csv"));

    fs::remove_all(dir);
}

TEST_CASE("load_spec reads files and rejects missing ones") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pdo_spec_test";
    fs::create_directories(dir);
    const fs::path file = dir / "spec.json";

    {
        std::ofstream out(file);
        out << serialize_spec(minimal_simulate());
    }
    const ExperimentSpec spec = load_spec(file.string());
    CHECK(spec == minimal_simulate());

    CHECK_THROWS_AS(load_spec((dir / "absent.json").string()), IoError);
    fs::remove_all(dir);
}
