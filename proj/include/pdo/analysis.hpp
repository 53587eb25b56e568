#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pdo/sim.hpp"

namespace pdo {

/// Distance from r to the nearest integer: the aliased image of a tone at
/// ratio r, always in [0, 0.5].
inline double fold(double r) { return std::fabs(r - std::round(r)); }

/// Normalized digital oscillation frequency predicted by the linear analysis
/// of the single-feedback loop with one delay:
///   f_D = arccos(exp(-rho*2*pi*r) * cos(2*pi*r*sqrt(1-rho^2))) / (2*pi).
/// For rho = 0 this reduces to fold(r).
double linear_fd(double r, double rho);

/// Time-domain frequency estimate: adjacent unequal bit pairs over 2*(N-1).
/// Requires at least two bits.
double estimate_fd_transitions(const BitStream& bits);

enum class Window { Rectangular, Hann };

/// Magnitude spectrum of a bipolar-mapped bitstream with an interpolated peak.
struct SpectrumResult {
    std::vector<double> bin_frequencies;      ///< cycles/sample, [0, 0.5]
    std::vector<double> bin_frequencies_hz;   ///< bin_frequencies * fS
    std::vector<double> magnitudes;
    double peak_frequency = 0.0;     ///< normalized, in (0, 0.5]
    double peak_frequency_hz = 0.0;
    double peak_magnitude = 0.0;
};

/// Bits are mapped {0 -> -1, 1 -> +1}, de-meaned so the DC lobe cannot mask
/// low-frequency peaks, windowed, zero-padded to transform_size and
/// transformed. The peak is the largest non-DC bin refined by three-point
/// parabolic interpolation on log magnitude.
///
/// transform_size 0 picks the default: next power of two >= 4x the bit count.
SpectrumResult spectrum(const BitStream& bits,
                        Window window = Window::Rectangular,
                        std::size_t transform_size = 0);

/// Candidate absolute frequencies that alias to the observed normalized
/// frequency, and the one closest to the caller's expectation.
struct UnfoldResult {
    std::vector<double> candidates_hz;  ///< ascending
    double best_hz = 0.0;               ///< candidate nearest hint_f0
};

/// Enumerates {(k + fD)*fS, (k + 1 - fD)*fS} for k = 0, 1, ... up to at least
/// 2*hint_f0 and picks the candidate nearest the hint.
UnfoldResult unfold_frequency(double fd, double fs, double hint_f0);

enum class Estimator { Transitions, Spectrum };

/// One sweep row. A run that diverged leaves the estimates empty.
struct SweepPoint {
    double ratio = 0.0;
    std::optional<double> fd_estimated;
    double fd_linear = 0.0;
    std::optional<double> deviation;  ///< |fd_estimated - fd_linear|
};

struct SweepResult {
    std::vector<SweepPoint> points;  ///< ordered by ratio
    SimConfig base_config;           ///< snapshot; ratio varies per point
    Estimator estimator = Estimator::Transitions;
};

/// Evenly spaced ratio grid, endpoints included (steps >= 2; steps == 1
/// yields just `start`).
std::vector<double> ratio_grid(double start, double stop, std::size_t steps);

/// Runs the loop at every ratio in the grid and records the estimated f_D
/// next to the linear prediction. Points whose run diverges are kept as
/// missing estimates rather than failing the sweep. Points are independent
/// and evaluated in parallel; rows come back in grid order.
SweepResult staircase_sweep(const std::vector<double>& grid,
                            const SimConfig& base,
                            Estimator estimator = Estimator::Transitions);

/// Per-ratio comparison of the two feedback wirings on an identical grid.
struct ComparisonPoint {
    double ratio = 0.0;
    std::optional<double> fd_single;
    std::optional<double> fd_double;
    std::optional<double> dev_single;  ///< |fd_single - fold(r)|
    std::optional<double> dev_double;  ///< |fd_double - fold(r)|
    double injected_single = 0.0;
    double injected_double = 0.0;
};

struct TopologyComparison {
    std::vector<ComparisonPoint> points;
    double mean_dev_single = 0.0;   ///< over points where both runs finished
    double mean_dev_double = 0.0;
    double injected_total_single = 0.0;
    double injected_total_double = 0.0;
    int taps_single = 1;
    int taps_double_1 = 1;
    int taps_double_2 = 2;
};

/// Runs Single{m} and Double{m1,m2} over the same grid and aggregates the
/// distance of each estimate from fold(r) plus the injected-energy totals.
/// The single tap is taken from the base config when it is single-feedback
/// (default Single{1}); the double taps from the base when it is double
/// (default Double{1,2}).
TopologyComparison compare_topologies(const std::vector<double>& grid,
                                      const SimConfig& base,
                                      Estimator estimator =
                                          Estimator::Transitions);

}  // namespace pdo
