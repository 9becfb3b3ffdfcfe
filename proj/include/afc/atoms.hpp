#pragma once

// Three-level lambda system |g>, |s>, |e> for one detuning class.
//
// Rotating frame, one frame per transition. With hbar = 1 and angular units:
//   H = 2 pi delta |e><e| + 2 pi eps |s><s|
//       + pi (Omega_ge |e><g| + Omega_se |e><s| + h.c.)
// where delta is the optical detuning of the class relative to the input carrier and
// eps its spin detuning. Free evolution gives c_e ~ exp(-i 2 pi delta t).

#include <array>
#include <limits>
#include <cmath>
#include <string>
#include <vector>

#include "afc/common.hpp"
#include "afc/pulses.hpp"

namespace afc {

struct FrequencyClass {
    double optical_detuning_hz = 0.0;
    double spin_detuning_hz = 0.0;
    double weight = 1.0;
};

struct AtomState {
    Complex g{1.0, 0.0};
    Complex s{};
    Complex e{};
    double time_stamp = 0.0;

    double norm() const { return std::norm(g) + std::norm(s) + std::norm(e); }

    static AtomState ground() { return {}; }
    static AtomState excited() { return {Complex{}, Complex{}, Complex{1.0, 0.0}, 0.0}; }
    static AtomState spin() { return {Complex{}, Complex{1.0, 0.0}, Complex{}, 0.0}; }
};

/// 3x3 density matrix, row-major with basis order (g, s, e).
struct DensityMatrix {
    std::array<Complex, 9> rho{};
    double time_stamp = 0.0;

    Complex& operator()(int i, int j) { return rho[static_cast<std::size_t>(3 * i + j)]; }
    const Complex& operator()(int i, int j) const { return rho[static_cast<std::size_t>(3 * i + j)]; }

    double trace() const { return ((*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2)).real(); }

    static DensityMatrix from(const AtomState& a)
    {
        DensityMatrix m;
        const std::array<Complex, 3> c{a.g, a.s, a.e};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = c[static_cast<std::size_t>(i)] * std::conj(c[static_cast<std::size_t>(j)]);
        m.time_stamp = a.time_stamp;
        return m;
    }
};

/// Complex Rabi frequencies (Hz) on the two transitions.
struct Drive {
    Complex ge{};
    Complex se{};
};

/// Field samples at the start, middle and end of one integrator step.
struct DriveStep {
    Drive start;
    Drive mid;
    Drive end;

    static DriveStep constant(Drive d) { return {d, d, d}; }
};

/// Homogeneous linewidths (FWHM, Hz). The pure-state backend damps the amplitude of the
/// level at pi * linewidth; the density-matrix backend dephases the coherences of that
/// level at the same rate.
struct Decay {
    double optical_linewidth_hz = 1e3;
    double spin_linewidth_hz = 0.0;

    static Decay none() { return {0.0, 0.0}; }
};

struct Amplitudes {
    Complex g, s, e;
};

inline Amplitudes derivative(const Amplitudes& a, double delta_hz, double eps_hz, const Drive& d, const Decay& decay)
{
    const double pe = kPi * decay.optical_linewidth_hz;
    const double ps = kPi * decay.spin_linewidth_hz;
    return {
        -kI * (kPi * std::conj(d.ge) * a.e),
        -kI * (kTwoPi * eps_hz * a.s + kPi * std::conj(d.se) * a.e) - ps * a.s,
        -kI * (kTwoPi * delta_hz * a.e + kPi * (d.ge * a.g + d.se * a.s)) - pe * a.e,
    };
}

inline double stability_limit_s(const FrequencyClass& c, const Drive& d)
{
    const double rate = std::max({std::abs(d.ge), std::abs(d.se), std::abs(c.optical_detuning_hz),
                                  std::abs(c.spin_detuning_hz),
                                  std::abs(c.optical_detuning_hz - c.spin_detuning_hz)});
    return rate > 0 ? 1.0 / (20.0 * rate) : std::numeric_limits<double>::infinity();
}

inline void check_step(double dt, const FrequencyClass& c, const DriveStep& f)
{
    const double limit = std::min({stability_limit_s(c, f.start), stability_limit_s(c, f.mid), stability_limit_s(c, f.end)});
    if (!(dt > 0) || dt > limit * (1 + 1e-9)) {
        throw NumericsError("evolve: step " + std::to_string(dt) + " s violates the stability bound "
                            + std::to_string(limit) + " s = 1/(20 max(|Omega|, |delta|, |eps|))");
    }
}

/// One classical RK4 step of the pure-state equations.
inline AtomState evolve(const AtomState& state, const FrequencyClass& c, const DriveStep& f, double dt,
                        const Decay& decay = {})
{
    check_step(dt, c, f);
    const double dl = c.optical_detuning_hz;
    const double ep = c.spin_detuning_hz;
    const Amplitudes y{state.g, state.s, state.e};
    auto axpy = [](const Amplitudes& a, double h, const Amplitudes& k) {
        return Amplitudes{a.g + h * k.g, a.s + h * k.s, a.e + h * k.e};
    };
    const Amplitudes k1 = derivative(y, dl, ep, f.start, decay);
    const Amplitudes k2 = derivative(axpy(y, 0.5 * dt, k1), dl, ep, f.mid, decay);
    const Amplitudes k3 = derivative(axpy(y, 0.5 * dt, k2), dl, ep, f.mid, decay);
    const Amplitudes k4 = derivative(axpy(y, dt, k3), dl, ep, f.end, decay);
    const double w = dt / 6.0;
    return {y.g + w * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g), y.s + w * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
            y.e + w * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e), state.time_stamp + dt};
}

inline AtomState evolve(const AtomState& state, const FrequencyClass& c, Drive field, double dt, const Decay& decay = {})
{
    return evolve(state, c, DriveStep::constant(field), dt, decay);
}

namespace detail {

inline DensityMatrix lindblad_rhs(const DensityMatrix& r, double delta_hz, double eps_hz, const Drive& d,
                                  const Decay& decay)
{
    std::array<Complex, 9> h{};
    auto H = [&](int i, int j) -> Complex& { return h[static_cast<std::size_t>(3 * i + j)]; };
    H(1, 1) = kTwoPi * eps_hz;
    H(2, 2) = kTwoPi * delta_hz;
    H(2, 0) = kPi * d.ge;
    H(0, 2) = kPi * std::conj(d.ge);
    H(2, 1) = kPi * d.se;
    H(1, 2) = kPi * std::conj(d.se);
    // coherence damping rates; populations untouched
    const double pe = kPi * decay.optical_linewidth_hz;
    const double ps = kPi * decay.spin_linewidth_hz;
    const std::array<double, 3> level_rate{0.0, ps, pe};
    DensityMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Complex comm{};
            for (int k = 0; k < 3; ++k) comm += H(i, k) * r(k, j) - r(i, k) * H(k, j);
            Complex v = -kI * comm;
            if (i != j) v -= (level_rate[static_cast<std::size_t>(i)] + level_rate[static_cast<std::size_t>(j)]) * r(i, j);
            out(i, j) = v;
        }
    }
    return out;
}

}  // namespace detail

/// RK4 step of the Lindblad equation. Agrees with the pure-state backend when all decay
/// rates are zero.
inline DensityMatrix evolve(const DensityMatrix& state, const FrequencyClass& c, const DriveStep& f, double dt,
                            const Decay& decay = {})
{
    check_step(dt, c, f);
    auto axpy = [](const DensityMatrix& a, double h, const DensityMatrix& k) {
        DensityMatrix o;
        for (std::size_t i = 0; i < 9; ++i) o.rho[i] = a.rho[i] + h * k.rho[i];
        return o;
    };
    const double dl = c.optical_detuning_hz;
    const double ep = c.spin_detuning_hz;
    const auto k1 = detail::lindblad_rhs(state, dl, ep, f.start, decay);
    const auto k2 = detail::lindblad_rhs(axpy(state, 0.5 * dt, k1), dl, ep, f.mid, decay);
    const auto k3 = detail::lindblad_rhs(axpy(state, 0.5 * dt, k2), dl, ep, f.mid, decay);
    const auto k4 = detail::lindblad_rhs(axpy(state, dt, k3), dl, ep, f.end, decay);
    DensityMatrix out;
    for (std::size_t i = 0; i < 9; ++i) {
        out.rho[i] = state.rho[i] + dt / 6.0 * (k1.rho[i] + 2.0 * k2.rho[i] + 2.0 * k3.rho[i] + k4.rho[i]);
    }
    out.time_stamp = state.time_stamp + dt;
    return out;
}

inline DensityMatrix evolve(const DensityMatrix& state, const FrequencyClass& c, Drive field, double dt,
                            const Decay& decay = {})
{
    return evolve(state, c, DriveStep::constant(field), dt, decay);
}

struct TransferOptions {
    Decay decay = Decay::none();
};

/// Applies a control pulse to one class and returns the full final state. The control
/// grid is integrated with steps of two samples; steps are subdivided (interpolating the
/// envelope) when the class detuning would violate the stability bound.
inline AtomState apply_control(const PulseEnvelope& control, const FrequencyClass& c, AtomState state,
                               const TransferOptions& options = {})
{
    require(control.transition == Transition::s_e, "transfer: control must target the s_e transition");
    require(control.size() >= 3, "transfer: control grid too short");
    const double peak = control.peak();
    if (peak > 0) {
        const double edge = std::max(std::abs(control.samples.front()), std::abs(control.samples.back()));
        require(edge <= 1e-4 * peak, "transfer: control grid does not cover the pulse support");
    }
    const double r = control.residual_detuning_hz();
    auto field = [&](double t) {
        Complex v = control.at(t);
        if (r != 0.0) v *= std::polar(1.0, -kTwoPi * r * t);
        return Drive{Complex{}, v};
    };
    const double h = 2.0 * control.dt;
    const FrequencyClass probe{c.optical_detuning_hz, c.spin_detuning_hz, 1.0};
    const Drive peak_drive{Complex{}, Complex{peak + std::abs(r), 0.0}};
    const int sub = std::max(1, static_cast<int>(std::ceil(h / stability_limit_s(probe, peak_drive) - 1e-9)));
    state.time_stamp = control.t_start;
    const std::size_t n_steps = (control.size() - 1) / 2;
    const double hs = h / sub;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t0 = control.time(2 * k);
        for (int m = 0; m < sub; ++m) {
            const double ta = t0 + m * hs;
            state = evolve(state, probe, DriveStep{field(ta), field(ta + 0.5 * hs), field(ta + hs)}, hs, options.decay);
        }
    }
    if ((control.size() - 1) % 2 == 1) {
        const double ta = control.time(control.size() - 2);
        const double hl = control.dt;
        const int subl = std::max(1, static_cast<int>(std::ceil(hl / stability_limit_s(probe, peak_drive) - 1e-9)));
        for (int m = 0; m < subl; ++m) {
            const double a = ta + m * hl / subl;
            state = evolve(state, probe, DriveStep{field(a), field(a + 0.5 * hl / subl), field(a + hl / subl)},
                           hl / subl, options.decay);
        }
    }
    return state;
}

/// Population moved by the control: |e> -> |s> when the initial state has its population
/// in |e>, otherwise |s> -> |e>. Normalized by the initial source population.
inline double transfer_efficiency(const PulseEnvelope& control, const FrequencyClass& c, const AtomState& initial,
                                  const TransferOptions& options = {})
{
    const bool from_e = std::norm(initial.e) >= std::norm(initial.s);
    const double source = from_e ? std::norm(initial.e) : std::norm(initial.s);
    require(source > 0, "transfer: initial state has no population in |e> or |s>");
    const AtomState out = apply_control(control, c, initial, options);
    return (from_e ? std::norm(out.s) : std::norm(out.e)) / source;
}

/// Uniform average of the |e> -> |s> transfer over the band, sampled at the midpoints of
/// n equal sub-bands (second-order accurate, unlike endpoint-inclusive sampling).
inline double band_averaged_transfer(const PulseEnvelope& control, double band_hz, int n_samples,
                                     const TransferOptions& options = {})
{
    require(n_samples >= 11, "band_averaged_transfer: n_samples >= 11 violated");
    require(band_hz >= 0, "band_averaged_transfer: band >= 0 violated");
    if (band_hz == 0.0) {
        return transfer_efficiency(control, FrequencyClass{}, AtomState::excited(), options);
    }
    const auto n = static_cast<std::size_t>(n_samples);
    const auto values = parallel_map<double>(n, [&](std::size_t i) {
        const double x = -0.5 * band_hz + band_hz * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        return transfer_efficiency(control, FrequencyClass{x, 0.0, 1.0}, AtomState::excited(), options);
    });
    return pairwise_sum<double>(values) / static_cast<double>(n);
}

}  // namespace afc
