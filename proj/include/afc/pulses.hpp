#pragma once

// Time-domain pulse envelopes.
//
// Rabi convention: amplitudes are ordinary frequencies in Hz, chosen so that a resonant
// square pulse inverts a two-level atom when Omega * T = 1/2. The atoms module couples a
// field sample Omega as pi * Omega in the Hamiltonian (angular units).

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "afc/common.hpp"

namespace afc {

enum class Transition { g_e, s_e };
enum class Direction { forward, backward };

inline std::string_view to_string(Transition t) { return t == Transition::g_e ? "g_e" : "s_e"; }
inline std::string_view to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

inline std::optional<Direction> parse_direction(std::string_view s)
{
    if (s == "forward") return Direction::forward;
    if (s == "backward") return Direction::backward;
    return std::nullopt;
}

/// Offset of a transition's line center from the g-e line, Hz.
inline double line_offset_hz(Transition t) { return t == Transition::s_e ? -kGroundSplittingHz : 0.0; }

struct PulseEnvelope {
    std::vector<Complex> samples;
    double t_start = 0.0;
    double dt = 1e-9;
    double carrier_detuning_hz = 0.0;  ///< carrier relative to the g-e line center
    Transition transition = Transition::g_e;
    Direction direction = Direction::forward;

    std::size_t size() const { return samples.size(); }
    double time(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
    double t_end() const { return samples.empty() ? t_start : time(samples.size() - 1); }

    /// Carrier offset from the addressed line center. Zero for a resonant pulse.
    double residual_detuning_hz() const { return carrier_detuning_hz - line_offset_hz(transition); }

    double peak() const
    {
        double m = 0.0;
        for (const auto& s : samples) m = std::max(m, std::abs(s));
        return m;
    }

    /// Envelope at time t. Exact on grid points, Catmull-Rom between them, zero outside.
    Complex at(double t) const
    {
        if (samples.empty()) return {};
        const double u = (t - t_start) / dt;
        const double last = static_cast<double>(samples.size() - 1);
        if (u < -1e-9 || u > last + 1e-9) return {};
        const double r = std::round(u);
        if (std::abs(u - r) < 1e-7) {
            return samples[static_cast<std::size_t>(std::clamp(r, 0.0, last))];
        }
        const auto i = static_cast<long>(std::floor(u));
        const double f = u - static_cast<double>(i);
        auto s = [&](long k) -> Complex {
            if (k < 0 || k > static_cast<long>(last)) return {};
            return samples[static_cast<std::size_t>(k)];
        };
        const Complex p0 = s(i - 1), p1 = s(i), p2 = s(i + 1), p3 = s(i + 2);
        return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

/// Sample placement: times are t_origin + k*dt. dt <= 0 picks a shape-dependent default.
struct SampleGrid {
    double dt = 0.0;
    double t_origin = 0.0;
};

namespace detail {

template <typename Fn>
PulseEnvelope sample_envelope(double t_lo, double t_hi, const SampleGrid& grid, Fn&& value)
{
    PulseEnvelope p;
    p.dt = grid.dt;
    const double k0 = std::floor((t_lo - grid.t_origin) / grid.dt);
    const double k1 = std::ceil((t_hi - grid.t_origin) / grid.dt);
    p.t_start = grid.t_origin + k0 * grid.dt;
    const auto n = static_cast<std::size_t>(k1 - k0) + 1;
    p.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.samples[i] = value(p.time(i));
    }
    return p;
}

inline double log_cosh(double x)
{
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace detail

inline PulseEnvelope gaussian_pulse(double fwhm_s, Complex peak_amplitude, double t_center_s,
                                    Transition transition = Transition::g_e,
                                    Direction direction = Direction::forward, SampleGrid grid = {})
{
    require(fwhm_s > 0 && std::isfinite(fwhm_s), "gaussian_pulse: fwhm > 0 violated");
    if (grid.dt <= 0) grid.dt = std::min(fwhm_s / 100.0, 2e-9);
    const double half_span = 2.6 * fwhm_s;  // envelope ~ 7e-9 of peak at the ends
    const double a = 4.0 * std::log(2.0) / (fwhm_s * fwhm_s);
    auto p = detail::sample_envelope(t_center_s - half_span, t_center_s + half_span, grid, [&](double t) {
        const double x = t - t_center_s;
        return peak_amplitude * std::exp(-a * x * x);
    });
    p.transition = transition;
    p.direction = direction;
    p.carrier_detuning_hz = line_offset_hz(transition);
    return p;
}

/// Spectral FWHM of a transform-limited Gaussian of the given temporal FWHM.
inline double gaussian_spectral_fwhm(double fwhm_s) { return 2.0 * std::log(2.0) / (kPi * fwhm_s); }

enum class DurationConvention {
    amplitude_fwhm,  ///< duration is the FWHM of |Omega(t)|
    time_constant,   ///< duration is tau in sech(t/tau)
};

inline std::optional<DurationConvention> parse_duration_convention(std::string_view s)
{
    if (s == "amplitude_fwhm") return DurationConvention::amplitude_fwhm;
    if (s == "time_constant") return DurationConvention::time_constant;
    return std::nullopt;
}

inline std::string_view to_string(DurationConvention c)
{
    return c == DurationConvention::amplitude_fwhm ? "amplitude_fwhm" : "time_constant";
}

inline double sech_time_constant(double duration_s, DurationConvention c)
{
    return c == DurationConvention::amplitude_fwhm ? duration_s / (2.0 * std::acosh(2.0)) : duration_s;
}

struct SechOptions {
    DurationConvention convention = DurationConvention::amplitude_fwhm;
    double preparation_window_hz = kDefaultPreparationWindowHz;
    SampleGrid grid;
};

/// Complex hyperbolic secant: |Omega| = peak * sech((t - tc)/tau) with an instantaneous
/// frequency sweep (chirp/2) * tanh((t - tc)/tau), carried as envelope phase.
inline PulseEnvelope sech_pulse(double duration_s, double peak_rabi_hz, double chirp_width_hz, double t_center_s,
                                Transition transition = Transition::s_e,
                                Direction direction = Direction::backward, SechOptions options = {})
{
    require(duration_s > 0 && std::isfinite(duration_s), "sech_pulse: duration > 0 violated");
    require(peak_rabi_hz >= 0 && std::isfinite(peak_rabi_hz), "sech_pulse: peak_rabi >= 0 violated");
    require(chirp_width_hz >= 0 && std::isfinite(chirp_width_hz), "sech_pulse: chirp_width >= 0 violated");
    require(chirp_width_hz <= options.preparation_window_hz,
            "sech_pulse: chirp_width exceeds the preparation window");
    const double tau = sech_time_constant(duration_s, options.convention);
    if (options.grid.dt <= 0) options.grid.dt = std::min(tau / 50.0, 2e-9);
    const double half_span = 12.5 * tau;  // sech(12.5) ~ 7e-6
    const double phase_scale = kTwoPi * 0.5 * chirp_width_hz * tau;
    auto p = detail::sample_envelope(t_center_s - half_span, t_center_s + half_span, options.grid, [&](double t) {
        const double x = (t - t_center_s) / tau;
        const double amp = peak_rabi_hz / std::cosh(x);
        return std::polar(amp, phase_scale * detail::log_cosh(x));
    });
    p.transition = transition;
    p.direction = direction;
    p.carrier_detuning_hz = line_offset_hz(transition);
    return p;
}

/// Flat-top pulse with edges on grid points (half-weight edge samples), so the
/// trapezoidal area is exact.
inline PulseEnvelope square_pulse(double duration_s, Complex rabi_hz, double t_center_s,
                                  Transition transition = Transition::s_e,
                                  Direction direction = Direction::forward, double dt = 0.0)
{
    require(duration_s > 0, "square_pulse: duration > 0 violated");
    if (dt <= 0) dt = duration_s / 200.0;
    const auto n_in = static_cast<long>(std::llround(duration_s / dt));
    require(n_in >= 1, "square_pulse: dt larger than the duration");
    const double h = duration_s / static_cast<double>(n_in);
    PulseEnvelope p;
    p.dt = h;
    const long pad = 4;
    p.t_start = t_center_s - 0.5 * duration_s - pad * h;
    p.samples.assign(static_cast<std::size_t>(n_in + 2 * pad + 1), Complex{});
    for (long k = 0; k <= n_in; ++k) {
        p.samples[static_cast<std::size_t>(k + pad)] = (k == 0 || k == n_in) ? 0.5 * rabi_hz : rabi_hz;
    }
    p.transition = transition;
    p.direction = direction;
    p.carrier_detuning_hz = line_offset_hz(transition);
    return p;
}

/// (1/2pi) d(arg)/dt by centered differences, interpolated linearly between samples.
inline double instantaneous_frequency(const PulseEnvelope& pulse, double t)
{
    const std::size_t n = pulse.size();
    if (n < 2 || t < pulse.t_start - 1e-12 || t > pulse.t_end() + 1e-12) {
        throw ValidationError("instantaneous_frequency: t outside the pulse grid");
    }
    auto freq_at = [&](std::size_t i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = std::min(i + 1, n - 1);
        const Complex z = pulse.samples[hi] * std::conj(pulse.samples[lo]);
        if (z == Complex{}) return 0.0;
        return std::arg(z) / (kTwoPi * static_cast<double>(hi - lo) * pulse.dt);
    };
    const double u = std::clamp((t - pulse.t_start) / pulse.dt, 0.0, static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(u), n - 2);
    const double f = u - static_cast<double>(i);
    return (1 - f) * freq_at(i) + f * freq_at(i + 1);
}

/// 2pi * integral |Omega| dt (radians).
inline double pulse_area(const PulseEnvelope& pulse)
{
    std::vector<double> mag(pulse.size());
    for (std::size_t i = 0; i < pulse.size(); ++i) mag[i] = std::abs(pulse.samples[i]);
    return kTwoPi * trapezoid(mag, pulse.dt);
}

/// Integral |E|^2 dt.
inline double pulse_energy(const PulseEnvelope& pulse)
{
    std::vector<double> p(pulse.size());
    for (std::size_t i = 0; i < pulse.size(); ++i) p[i] = std::norm(pulse.samples[i]);
    return trapezoid(p, pulse.dt);
}

/// Intensity-weighted mean time.
inline double pulse_centroid(const PulseEnvelope& pulse)
{
    double w = 0.0, wt = 0.0;
    for (std::size_t i = 0; i < pulse.size(); ++i) {
        const double p = std::norm(pulse.samples[i]);
        w += p;
        wt += p * pulse.time(i);
    }
    return w > 0 ? wt / w : pulse.t_start;
}

/// S(nu) = sum_k E(t_k) exp(+i 2 pi nu (t_k - t_ref)) dt. With this sign a component
/// S(nu) exp(-i 2 pi nu t) excites atoms detuned by nu.
inline Complex spectral_amplitude(const PulseEnvelope& pulse, double frequency_hz, double t_ref)
{
    Complex acc{};
    const Complex step = std::polar(1.0, kTwoPi * frequency_hz * pulse.dt);
    Complex rot = std::polar(1.0, kTwoPi * frequency_hz * (pulse.t_start - t_ref));
    for (std::size_t i = 0; i < pulse.size(); ++i) {
        acc += pulse.samples[i] * rot;
        rot *= step;
        if ((i & 1023u) == 1023u) {
            rot = std::polar(1.0, kTwoPi * frequency_hz * (pulse.time(i + 1) - t_ref));
        }
    }
    return acc * pulse.dt;
}

inline void write_csv(std::ostream& os, const PulseEnvelope& p)
{
    os << "t_s,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << p.time(i) << ',' << p.samples[i].real() << ',' << p.samples[i].imag() << '\n';
    }
}

}  // namespace afc
