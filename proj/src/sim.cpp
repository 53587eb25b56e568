#include "pdo/sim.hpp"

#include <cmath>
#include <string>

namespace pdo {

void SimConfig::validate() const {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw InvalidParameter("ratio f0/fS must be positive and finite");
    }
    if (measure_samples < 1) {
        throw InvalidParameter("measure_samples must be >= 1");
    }
    if (!initial_state.finite()) {
        throw InvalidParameter("initial state must be finite");
    }
    feedback.validate();
}

SimTrace run(const SimConfig& config) {
    config.validate();

    const ResonatorParams& res = config.resonator;
    const Propagator step(res, config.dt());
    const Topology& topology = config.feedback.topology;
    const double kick_unit =
        static_cast<double>(config.feedback.polarity) * config.feedback.impulse;
    const double reference = config.feedback.quantizer_reference;
    const std::size_t total =
        config.transient_samples + config.measure_samples;

    SimTrace trace;
    trace.bits.sample_rate = config.sample_rate();
    trace.bits.bits.reserve(config.measure_samples);
    trace.positions.reserve(config.measure_samples);
    trace.velocities.reserve(config.measure_samples);
    trace.pulse_levels.reserve(config.measure_samples);

    DelayLine line(topology.max_tap());
    SimState state = config.initial_state;

    EnergyLedger ledger;
    ledger.initial_energy = energy(state, res);

    for (std::size_t n = 0; n < total; ++n) {
        if (!state.finite()) {
            throw Diverged(n, "state became non-finite at sample " +
                                  std::to_string(n));
        }

        const int bit = quantize(state.x, reference);
        const int level = pulse_level(line, topology);
        line = line.push(bit);

        if (n >= config.transient_samples) {
            trace.bits.bits.push_back(static_cast<std::uint8_t>(bit));
            trace.positions.push_back(state.x);
            trace.velocities.push_back(state.v);
            trace.pulse_levels.push_back(level);
        }

        if (level != 0 && kick_unit != 0.0) {
            const double kick = kick_unit * static_cast<double>(level);
            ledger.injected_total +=
                impulse_energy_gain(kick, state.v, res.mass());
            state = apply_impulse(state, res, kick);
        }

        const double before = energy(state, res);
        state = step.apply(state);
        ledger.dissipated_total += before - energy(state, res);
    }

    if (!state.finite()) {
        throw Diverged(total, "state became non-finite at sample " +
                                  std::to_string(total));
    }
    ledger.final_energy = energy(state, res);
    trace.ledger = ledger;
    return trace;
}

namespace {

constexpr int kRequiredRepetitions = 4;

}  // namespace

std::optional<PeriodInfo> detect_period(std::span<const int> seq,
                                        int max_period) {
    if (max_period < 1) {
        throw InvalidParameter("max_period must be >= 1");
    }
    const std::size_t n = seq.size();
    for (int p = 1; p <= max_period; ++p) {
        const std::size_t window =
            static_cast<std::size_t>(p) * kRequiredRepetitions;
        if (window > n) {
            break;  // longer candidate periods cannot fit either
        }
        const std::size_t start = n - window;
        bool periodic = true;
        for (std::size_t i = start; i + static_cast<std::size_t>(p) < n; ++i) {
            if (seq[i] != seq[i + static_cast<std::size_t>(p)]) {
                periodic = false;
                break;
            }
        }
        if (periodic) {
            std::string pattern;
            pattern.reserve(static_cast<std::size_t>(p));
            for (std::size_t i = n - static_cast<std::size_t>(p); i < n; ++i) {
                pattern += std::to_string(seq[i]);
            }
            return PeriodInfo{p, pattern};
        }
    }
    return std::nullopt;
}

std::optional<PeriodInfo> detect_period(const BitStream& bits,
                                        int max_period) {
    std::vector<int> seq(bits.bits.begin(), bits.bits.end());
    return detect_period(std::span<const int>(seq), max_period);
}

bool is_rotation(const std::string& pattern, const std::string& reference) {
    if (pattern.size() != reference.size() || pattern.empty()) {
        return false;
    }
    const std::string doubled = reference + reference;
    return doubled.find(pattern) != std::string::npos;
}

}  // namespace pdo
