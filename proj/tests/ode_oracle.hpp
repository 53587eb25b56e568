#pragma once

#include <cstddef>

// Independent reference for the free damped oscillator
//     m*x'' + b*x' + k*x = 0,
// integrated with classic fixed-step RK4 and nothing shared with the library
// under test. Step counts are chosen by the caller; position error of RK4 at
// N steps over a span T scales like (T/N)^4, so a few thousand steps per
// oscillation period put the oracle far below the tolerances it guards.

namespace oracle {

struct State {
    double x;
    double v;
};

inline State rk4_free_decay(double mass, double stiffness, double damping,
                            State s0, double span, std::size_t steps) {
    const double h = span / static_cast<double>(steps);
    double x = s0.x;
    double v = s0.v;
    auto ax = [&](double xx, double vv) {
        return -(stiffness * xx + damping * vv) / mass;
    };
    for (std::size_t i = 0; i < steps; ++i) {
        const double k1x = v;
        const double k1v = ax(x, v);
        const double k2x = v + 0.5 * h * k1v;
        const double k2v = ax(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        const double k3x = v + 0.5 * h * k2v;
        const double k3v = ax(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        const double k4x = v + h * k3v;
        const double k4v = ax(x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return {x, v};
}

}  // namespace oracle
