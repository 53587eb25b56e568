#pragma once

#include <cmath>

#include "pdo/error.hpp"

namespace pdo {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Parameters of an underdamped 1D mass-spring-damper resonator.
///
/// The canonical inputs are the natural frequency f0 [Hz] and the
/// dimensionless damping ratio rho; stiffness and damping coefficient are
/// derived so that rho = b / (2*sqrt(k*m)) and 2*pi*f0 = sqrt(k/m) hold.
/// Only the underdamped regime (rho < 1) is representable.
class ResonatorParams {
  public:
    /// Resonator given by natural frequency [Hz] and damping ratio.
    ResonatorParams(double f0, double rho, double mass = 1.0)
        : f0_(f0), rho_(rho), mass_(mass) {
        if (!(f0 > 0.0) || !std::isfinite(f0)) {
            throw InvalidParameter("f0 must be positive and finite");
        }
        if (!(mass > 0.0) || !std::isfinite(mass)) {
            throw InvalidParameter("mass must be positive and finite");
        }
        if (!(rho >= 0.0) || !std::isfinite(rho)) {
            throw InvalidParameter("rho must be finite and >= 0");
        }
        if (rho >= 1.0) {
            throw Overdamped("rho must be < 1 (underdamped regime)");
        }
        const double w0 = kTwoPi * f0;
        k_ = mass * w0 * w0;
        b_ = rho * 2.0 * std::sqrt(k_ * mass);
    }

    /// Dimensionless resonator with omega0 = 1 rad/s and unit mass. The loop
    /// dynamics depend only on (f0/fS, rho, impulse) up to scaling, so this is
    /// the default working frame.
    static ResonatorParams normalized(double rho) {
        return ResonatorParams(1.0 / kTwoPi, rho, 1.0);
    }

    [[nodiscard]] double f0() const { return f0_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double mass() const { return mass_; }
    [[nodiscard]] double stiffness() const { return k_; }
    [[nodiscard]] double damping() const { return b_; }
    [[nodiscard]] double omega0() const { return kTwoPi * f0_; }
    /// Damped angular frequency omega0 * sqrt(1 - rho^2).
    [[nodiscard]] double omega_d() const {
        return omega0() * std::sqrt(1.0 - rho_ * rho_);
    }

  private:
    double f0_;
    double rho_;
    double mass_;
    double k_;
    double b_;
};

/// Builds resonator parameters from the physical (mass, stiffness, damping)
/// triple. Rejects non-positive mass/stiffness and the overdamped regime.
inline ResonatorParams params_from_physical(double mass, double k, double b) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw InvalidParameter("mass must be positive and finite");
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw InvalidParameter("stiffness k must be positive and finite");
    }
    if (!(b >= 0.0) || !std::isfinite(b)) {
        throw InvalidParameter("damping b must be finite and >= 0");
    }
    const double rho = b / (2.0 * std::sqrt(k * mass));
    if (rho >= 1.0) {
        throw Overdamped("b/(2*sqrt(k*m)) must be < 1 (underdamped regime)");
    }
    const double f0 = std::sqrt(k / mass) / kTwoPi;
    return ResonatorParams(f0, rho, mass);
}

/// Instantaneous mechanical state of the resonator.
struct SimState {
    double x = 0.0;  ///< position
    double v = 0.0;  ///< velocity
    double t = 0.0;  ///< elapsed time

    [[nodiscard]] bool finite() const {
        return std::isfinite(x) && std::isfinite(v) && std::isfinite(t);
    }
};

/// Precomputed state-transition matrix for the free (unforced) resonator over
/// a fixed step dt. Applying it advances the exact closed-form solution of
/// m*x'' + b*x' + k*x = 0; there is no integrator truncation error.
class Propagator {
  public:
    Propagator(const ResonatorParams& params, double dt) : dt_(dt) {
        if (!(dt >= 0.0) || !std::isfinite(dt)) {
            throw InvalidParameter("dt must be finite and >= 0");
        }
        const double w0 = params.omega0();
        const double gamma = params.rho() * w0;
        const double wd = params.omega_d();
        const double decay = std::exp(-gamma * dt);
        const double c = std::cos(wd * dt);
        const double s = std::sin(wd * dt);
        const double s_wd = s / wd;
        xx_ = decay * (c + gamma * s_wd);
        xv_ = decay * s_wd;
        vx_ = -decay * w0 * w0 * s_wd;
        vv_ = decay * (c - gamma * s_wd);
    }

    [[nodiscard]] SimState apply(const SimState& s) const {
        return SimState{xx_ * s.x + xv_ * s.v, vx_ * s.x + vv_ * s.v,
                        s.t + dt_};
    }

    [[nodiscard]] double dt() const { return dt_; }

  private:
    double dt_;
    double xx_, xv_, vx_, vv_;
};

/// Advances the state by dt along the exact solution of the free resonator.
inline SimState propagate(const SimState& state, const ResonatorParams& params,
                          double dt) {
    if (!state.finite()) {
        throw InvalidParameter("propagate: state must be finite");
    }
    return Propagator(params, dt).apply(state);
}

/// Instantaneous velocity kick: v += impulse / mass. Position and time are
/// untouched, matching an idealized force delta.
inline SimState apply_impulse(const SimState& state,
                              const ResonatorParams& params, double impulse) {
    if (!std::isfinite(impulse)) {
        throw InvalidParameter("impulse must be finite");
    }
    return SimState{state.x, state.v + impulse / params.mass(), state.t};
}

/// Total mechanical energy 1/2*k*x^2 + 1/2*m*v^2.
inline double energy(const SimState& state, const ResonatorParams& params) {
    return 0.5 * params.stiffness() * state.x * state.x +
           0.5 * params.mass() * state.v * state.v;
}

/// Energy gained by a velocity kick of the given momentum applied at
/// pre-kick velocity v: J*v + J^2/(2m).
inline double impulse_energy_gain(double impulse, double v_before,
                                  double mass) {
    return impulse * v_before + impulse * impulse / (2.0 * mass);
}

}  // namespace pdo
