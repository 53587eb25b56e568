#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdo/feedback.hpp"
#include "pdo/resonator.hpp"

namespace pdo {

/// One-bit-per-sample output of the sign detector.
struct BitStream {
    std::vector<std::uint8_t> bits;
    double sample_rate = 1.0;  ///< fS [Hz]
};

/// Energy bookkeeping over a whole run (transient included).
/// Balance: final - initial = injected - dissipated, up to rounding.
struct EnergyLedger {
    double injected_total = 0.0;    ///< sum of J*v- + J^2/(2m) per kick
    double dissipated_total = 0.0;  ///< mechanical energy lost between samples
    double initial_energy = 0.0;
    double final_energy = 0.0;

    [[nodiscard]] double balance_residual() const {
        return final_energy - initial_energy - injected_total +
               dissipated_total;
    }
};

/// Full closed-loop experiment description.
struct SimConfig {
    ResonatorParams resonator = ResonatorParams::normalized(0.0);
    double ratio = 0.25;  ///< f0/fS, > 0
    FeedbackConfig feedback;
    std::size_t transient_samples = 2048;  ///< discarded before recording
    std::size_t measure_samples = 8192;    ///< recorded
    SimState initial_state{1e-6, 0.0, 0.0};

    [[nodiscard]] double sample_rate() const { return resonator.f0() / ratio; }
    [[nodiscard]] double dt() const { return ratio / resonator.f0(); }

    void validate() const;
};

/// Recorded loop output; every series covers the post-transient samples.
struct SimTrace {
    BitStream bits;
    std::vector<double> positions;
    std::vector<double> velocities;
    std::vector<int> pulse_levels;
    EnergyLedger ledger;
};

/// Runs the loop sample by sample. Per sample: read the position, emit the
/// sign bit, compute the pulse level from the bits already in the delay line,
/// push the new bit, kick the velocity by polarity*J*level, then advance one
/// sampling period along the exact free solution. Fully deterministic.
///
/// Throws Diverged (with the sample index) if the state stops being finite.
SimTrace run(const SimConfig& config);

/// Detected repetition in an integer sequence.
struct PeriodInfo {
    int period = 0;
    std::string pattern;  ///< one period, oldest first, as decimal digits
};

/// Smallest period p <= max_period such that the last 4*p entries repeat
/// exactly with period p; at least 4 repetitions must fit. The pattern is the
/// final p entries in stream order.
std::optional<PeriodInfo> detect_period(std::span<const int> seq,
                                        int max_period);
std::optional<PeriodInfo> detect_period(const BitStream& bits, int max_period);

/// True when `pattern` is a cyclic rotation of `reference`.
bool is_rotation(const std::string& pattern, const std::string& reference);

}  // namespace pdo
