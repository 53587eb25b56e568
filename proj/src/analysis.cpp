#include "pdo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <thread>

#include "pdo/fft.hpp"

namespace pdo {

double linear_fd(double r, double rho) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw InvalidParameter("ratio r must be positive and finite");
    }
    if (!(rho >= 0.0) || rho >= 1.0) {
        throw InvalidParameter("rho must be in [0, 1)");
    }
    const double envelope = std::exp(-rho * kTwoPi * r);
    const double arg =
        envelope * std::cos(kTwoPi * r * std::sqrt(1.0 - rho * rho));
    return std::acos(std::clamp(arg, -1.0, 1.0)) / kTwoPi;
}

double estimate_fd_transitions(const BitStream& bits) {
    const std::size_t n = bits.bits.size();
    if (n < 2) {
        throw InvalidParameter("transition estimate needs at least 2 bits");
    }
    std::size_t transitions = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        transitions += bits.bits[i] != bits.bits[i + 1] ? 1u : 0u;
    }
    return static_cast<double>(transitions) /
           (2.0 * static_cast<double>(n - 1));
}

namespace {

std::vector<double> make_window(Window window, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (window == Window::Hann && n > 1) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                         static_cast<double>(n - 1)));
        }
    }
    return w;
}

}  // namespace

SpectrumResult spectrum(const BitStream& bits, Window window,
                        std::size_t transform_size) {
    const std::size_t n = bits.bits.size();
    if (n == 0) {
        throw InvalidParameter("spectrum: empty bitstream");
    }
    std::size_t m = transform_size;
    if (m == 0) {
        m = next_pow2(4 * n);
    } else if (m < n || (m & (m - 1)) != 0) {
        throw InvalidParameter(
            "transform_size must be a power of two >= the bit count");
    }

    // Bipolar mapping with the mean removed; a one-bit stream always carries
    // a DC component whose window lobe would otherwise dominate low bins.
    std::vector<double> samples(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        samples[i] = bits.bits[i] ? 1.0 : -1.0;
        mean += samples[i];
    }
    mean /= static_cast<double>(n);

    const std::vector<double> win = make_window(window, n);
    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] = {(samples[i] - mean) * win[i], 0.0};
    }
    fft_radix2(buf);

    SpectrumResult result;
    const std::size_t half = m / 2;
    result.bin_frequencies.resize(half + 1);
    result.bin_frequencies_hz.resize(half + 1);
    result.magnitudes.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        result.bin_frequencies[k] =
            static_cast<double>(k) / static_cast<double>(m);
        result.bin_frequencies_hz[k] =
            result.bin_frequencies[k] * bits.sample_rate;
        result.magnitudes[k] = std::abs(buf[k]);
    }

    // peak over non-DC bins
    std::size_t peak_bin = 1;
    for (std::size_t k = 2; k <= half; ++k) {
        if (result.magnitudes[k] > result.magnitudes[peak_bin]) {
            peak_bin = k;
        }
    }

    double offset = 0.0;
    double peak_mag = result.magnitudes[peak_bin];
    if (peak_bin > 1 && peak_bin < half) {
        const double ml = result.magnitudes[peak_bin - 1];
        const double mc = result.magnitudes[peak_bin];
        const double mr = result.magnitudes[peak_bin + 1];
        if (ml > 0.0 && mc > 0.0 && mr > 0.0) {
            const double ll = std::log(ml);
            const double lc = std::log(mc);
            const double lr = std::log(mr);
            const double denom = ll - 2.0 * lc + lr;
            if (std::isfinite(denom) && std::fabs(denom) > 1e-300) {
                offset = 0.5 * (ll - lr) / denom;
                offset = std::clamp(offset, -0.5, 0.5);
                peak_mag = std::exp(lc - 0.25 * (ll - lr) * offset);
            }
        }
    }

    result.peak_frequency = (static_cast<double>(peak_bin) + offset) /
                            static_cast<double>(m);
    result.peak_frequency_hz = result.peak_frequency * bits.sample_rate;
    result.peak_magnitude = peak_mag;
    return result;
}

UnfoldResult unfold_frequency(double fd, double fs, double hint_f0) {
    if (!(fd >= 0.0) || fd > 0.5) {
        throw InvalidParameter("fd must be in [0, 0.5]");
    }
    if (!(fs > 0.0) || !std::isfinite(fs)) {
        throw InvalidParameter("fs must be positive and finite");
    }
    if (!(hint_f0 > 0.0) || !std::isfinite(hint_f0)) {
        throw InvalidParameter("hint_f0 must be positive and finite");
    }

    const double bound = std::max(2.0 * hint_f0, fs);
    UnfoldResult result;
    for (long k = 0;; ++k) {
        const double lower = (static_cast<double>(k) + fd) * fs;
        const double upper = (static_cast<double>(k) + 1.0 - fd) * fs;
        if (lower > bound && upper > bound) {
            break;
        }
        if (lower <= bound) {
            result.candidates_hz.push_back(lower);
        }
        if (upper <= bound && upper != lower) {
            result.candidates_hz.push_back(upper);
        }
    }
    std::sort(result.candidates_hz.begin(), result.candidates_hz.end());

    double best = result.candidates_hz.front();
    for (double c : result.candidates_hz) {
        if (std::fabs(c - hint_f0) < std::fabs(best - hint_f0)) {
            best = c;
        }
    }
    result.best_hz = best;
    return result;
}

std::vector<double> ratio_grid(double start, double stop, std::size_t steps) {
    if (steps < 1) {
        throw InvalidParameter("grid needs at least one step");
    }
    if (!(start > 0.0) || !(stop >= start)) {
        throw InvalidParameter("grid requires 0 < start <= stop");
    }
    std::vector<double> grid(steps);
    if (steps == 1) {
        grid[0] = start;
        return grid;
    }
    const double h = (stop - start) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        grid[i] = start + h * static_cast<double>(i);
    }
    grid.back() = stop;
    return grid;
}

namespace {

/// Evaluates fn(i) for i in [0, n) across a small thread pool; each index is
/// touched exactly once, so writers into per-index slots need no locks.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) {
        workers = 1;
    }
    workers = std::min<unsigned>(workers, 8);
    if (n < 2 || workers < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        }));
    }
    for (auto& t : tasks) {
        t.get();  // rethrows the first failure
    }
}

std::optional<double> estimate_fd(const SimTrace& trace, Estimator estimator) {
    if (estimator == Estimator::Spectrum) {
        return spectrum(trace.bits).peak_frequency;
    }
    return estimate_fd_transitions(trace.bits);
}

struct PointRun {
    std::optional<double> fd;
    double injected = 0.0;
    bool finished = false;
};

PointRun run_point(const SimConfig& base, double ratio,
                   const Topology& topology, Estimator estimator) {
    SimConfig config = base;
    config.ratio = ratio;
    config.feedback.topology = topology;
    PointRun out;
    try {
        const SimTrace trace = run(config);
        out.fd = estimate_fd(trace, estimator);
        out.injected = trace.ledger.injected_total;
        out.finished = true;
    } catch (const Diverged&) {
        // recorded as a missing point
    }
    return out;
}

}  // namespace

SweepResult staircase_sweep(const std::vector<double>& grid,
                            const SimConfig& base, Estimator estimator) {
    if (grid.empty()) {
        throw InvalidParameter("sweep grid must be nonempty");
    }
    for (double r : grid) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw InvalidParameter("sweep ratios must be positive and finite");
        }
    }
    base.validate();

    SweepResult result;
    result.base_config = base;
    result.estimator = estimator;
    result.points.resize(grid.size());

    const double rho = base.resonator.rho();
    parallel_for_index(grid.size(), [&](std::size_t i) {
        const double r = grid[i];
        SweepPoint point;
        point.ratio = r;
        point.fd_linear = linear_fd(r, rho);
        const PointRun pr =
            run_point(base, r, base.feedback.topology, estimator);
        if (pr.finished) {
            point.fd_estimated = pr.fd;
            point.deviation = std::fabs(*pr.fd - point.fd_linear);
        }
        result.points[i] = point;
    });
    return result;
}

TopologyComparison compare_topologies(const std::vector<double>& grid,
                                      const SimConfig& base,
                                      Estimator estimator) {
    if (grid.empty()) {
        throw InvalidParameter("comparison grid must be nonempty");
    }
    base.validate();

    TopologyComparison cmp;
    const Topology& base_topology = base.feedback.topology;
    if (base_topology.is_double()) {
        cmp.taps_double_1 = base_topology.tap1();
        cmp.taps_double_2 = base_topology.tap2();
    } else {
        cmp.taps_single = base_topology.tap1();
    }
    const Topology single = Topology::single(cmp.taps_single);
    const Topology dual =
        Topology::double_feedback(cmp.taps_double_1, cmp.taps_double_2);

    cmp.points.resize(grid.size());
    parallel_for_index(grid.size(), [&](std::size_t i) {
        const double r = grid[i];
        ComparisonPoint point;
        point.ratio = r;
        const PointRun rs = run_point(base, r, single, estimator);
        const PointRun rd = run_point(base, r, dual, estimator);
        if (rs.finished) {
            point.fd_single = rs.fd;
            point.dev_single = std::fabs(*rs.fd - fold(r));
            point.injected_single = rs.injected;
        }
        if (rd.finished) {
            point.fd_double = rd.fd;
            point.dev_double = std::fabs(*rd.fd - fold(r));
            point.injected_double = rd.injected;
        }
        cmp.points[i] = point;
    });

    std::size_t complete = 0;
    for (const ComparisonPoint& p : cmp.points) {
        if (p.dev_single && p.dev_double) {
            cmp.mean_dev_single += *p.dev_single;
            cmp.mean_dev_double += *p.dev_double;
            ++complete;
        }
        cmp.injected_total_single += p.injected_single;
        cmp.injected_total_double += p.injected_double;
    }
    if (complete > 0) {
        cmp.mean_dev_single /= static_cast<double>(complete);
        cmp.mean_dev_double /= static_cast<double>(complete);
    }
    return cmp;
}

}  // namespace pdo
