#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pdo/error.hpp"

namespace pdo {

/// Hard cap on delay-line depth; a uint64_t holds the whole history.
inline constexpr int kMaxTaps = 64;

/// Feedback wiring: either one delayed bit gates the pulse (levels {0,1}) or
/// two bits at distinct delays are summed (levels {0,1,2}).
class Topology {
  public:
    enum class Kind { Single, Double };

    static Topology single(int taps) {
        check_tap(taps, "taps");
        Topology t;
        t.kind_ = Kind::Single;
        t.tap1_ = taps;
        t.tap2_ = 0;
        return t;
    }

    static Topology double_feedback(int taps1, int taps2) {
        check_tap(taps1, "taps1");
        check_tap(taps2, "taps2");
        if (taps1 == taps2) {
            throw InvalidParameter("double feedback requires distinct taps");
        }
        Topology t;
        t.kind_ = Kind::Double;
        t.tap1_ = taps1;
        t.tap2_ = taps2;
        return t;
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_double() const { return kind_ == Kind::Double; }
    [[nodiscard]] int tap1() const { return tap1_; }
    [[nodiscard]] int tap2() const { return tap2_; }
    [[nodiscard]] int max_tap() const {
        return kind_ == Kind::Single ? tap1_ : (tap1_ > tap2_ ? tap1_ : tap2_);
    }
    /// Largest pulse level this wiring can emit.
    [[nodiscard]] int max_level() const {
        return kind_ == Kind::Single ? 1 : 2;
    }

  private:
    Topology() = default;

    static void check_tap(int tap, const char* name) {
        if (tap < 1 || tap > kMaxTaps) {
            throw InvalidParameter(std::string(name) +
                                   " must be in [1, " +
                                   std::to_string(kMaxTaps) + "]");
        }
    }

    Kind kind_ = Kind::Single;
    int tap1_ = 1;
    int tap2_ = 0;
};

/// Fixed-depth shift register of past sign bits, most recent first.
/// Initializes to all zeros (cleared registers: no pulses until real bits
/// arrive). Value type: push returns the advanced line.
class DelayLine {
  public:
    explicit DelayLine(int capacity) : capacity_(capacity) {
        if (capacity < 1 || capacity > kMaxTaps) {
            throw InvalidParameter("delay line capacity must be in [1, " +
                                   std::to_string(kMaxTaps) + "]");
        }
    }

    [[nodiscard]] int capacity() const { return capacity_; }

    /// Bit emitted `delay` samples ago (delay >= 1).
    [[nodiscard]] int bit_at(int delay) const {
        if (delay < 1 || delay > capacity_) {
            throw InvalidParameter("delay tap out of range");
        }
        return static_cast<int>((bits_ >> (delay - 1)) & 1u);
    }

    /// New line with `bit` as the most recent entry; the oldest drops off.
    [[nodiscard]] DelayLine push(int bit) const {
        if (bit != 0 && bit != 1) {
            throw InvalidParameter("delay line accepts only bits 0 and 1");
        }
        DelayLine next(*this);
        next.bits_ = ((bits_ << 1) | static_cast<std::uint64_t>(bit)) & mask();
        return next;
    }

    /// History as a vector, most recent first.
    [[nodiscard]] std::vector<int> history() const {
        std::vector<int> h(static_cast<std::size_t>(capacity_));
        for (int d = 1; d <= capacity_; ++d) {
            h[static_cast<std::size_t>(d - 1)] = bit_at(d);
        }
        return h;
    }

  private:
    [[nodiscard]] std::uint64_t mask() const {
        return capacity_ == 64 ? ~std::uint64_t{0}
                               : ((std::uint64_t{1} << capacity_) - 1u);
    }

    int capacity_;
    std::uint64_t bits_ = 0;
};

/// Digital loop settings: wiring, per-unit-level impulse strength, kick
/// direction and the comparator threshold.
struct FeedbackConfig {
    Topology topology = Topology::single(1);
    double impulse = 1e-3;  ///< momentum per unit pulse level, >= 0
    /// Kick direction. The loop reads the sign of the position a few samples
    /// back, so for the pulses to pump the oscillation they must oppose the
    /// remembered sign; -1 is the self-starting choice.
    int polarity = -1;
    double quantizer_reference = 0.0;

    void validate() const {
        if (!(impulse >= 0.0) || !std::isfinite(impulse)) {
            throw InvalidParameter("impulse must be finite and >= 0");
        }
        if (polarity != 1 && polarity != -1) {
            throw InvalidParameter("polarity must be +1 or -1");
        }
        if (!std::isfinite(quantizer_reference)) {
            throw InvalidParameter("quantizer reference must be finite");
        }
    }
};

/// Sampled sign detector: 1 when x is at or above the reference, else 0.
inline int quantize(double x, double reference = 0.0) {
    if (!std::isfinite(x)) {
        throw InvalidParameter("quantize: position must be finite");
    }
    return x >= reference ? 1 : 0;
}

/// Pulse level for the current sample, read from already-stored bits.
/// Single{m}: the bit at delay m. Double{m1,m2}: sum of the two delayed bits.
inline int pulse_level(const DelayLine& line, const Topology& topology) {
    if (line.capacity() < topology.max_tap()) {
        throw InvalidParameter("delay line shorter than the largest tap");
    }
    if (topology.kind() == Topology::Kind::Single) {
        return line.bit_at(topology.tap1());
    }
    return line.bit_at(topology.tap1()) + line.bit_at(topology.tap2());
}

/// Free-function spelling of DelayLine::push.
inline DelayLine push(const DelayLine& line, int bit) { return line.push(bit); }

}  // namespace pdo
