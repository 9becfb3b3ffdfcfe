#pragma once

// Comb-shaped absorption profiles.
//
// All frequencies are ordinary frequencies in Hz, measured relative to the input
// carrier. Optical depth d is the natural-log intensity depth: a weak probe at
// detuning x is transmitted with e^{-d(x)}.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "afc/common.hpp"

namespace afc {

enum class PeakShape { gaussian, lorentzian, square };

inline std::string_view to_string(PeakShape s)
{
    switch (s) {
    case PeakShape::gaussian: return "gaussian";
    case PeakShape::lorentzian: return "lorentzian";
    case PeakShape::square: return "square";
    }
    return "?";
}

inline std::optional<PeakShape> parse_peak_shape(std::string_view s)
{
    if (s == "gaussian") return PeakShape::gaussian;
    if (s == "lorentzian") return PeakShape::lorentzian;
    if (s == "square") return PeakShape::square;
    return std::nullopt;
}

struct CombSpec {
    double delta_hz = 250e3;  ///< tooth spacing
    double gamma_hz = 100e3;  ///< tooth FWHM
    double d_peak = 4.0;
    double d_background = 0.0;
    int n_peaks = 9;
    PeakShape peak_shape = PeakShape::gaussian;
    double center_offset_hz = 0.0;

    double bandwidth_hz() const { return n_peaks * delta_hz; }
    double period_s() const { return 1.0 / delta_hz; }
    double tooth_center_hz(int k) const
    {
        return center_offset_hz + (k - 0.5 * (n_peaks - 1)) * delta_hz;
    }

    bool operator==(const CombSpec&) const = default;
};

struct CombLimits {
    double preparation_window_hz = kDefaultPreparationWindowHz;
    int samples_per_tooth = 16;  ///< grid points per tooth FWHM, >= 8
};

inline void validate(const CombSpec& spec, const CombLimits& limits = {})
{
    require(std::isfinite(spec.delta_hz) && spec.delta_hz > 0, "comb: delta > 0 violated");
    require(std::isfinite(spec.gamma_hz) && spec.gamma_hz > 0, "comb: gamma > 0 violated");
    require(std::isfinite(spec.d_peak) && spec.d_peak >= 0, "comb: d_peak >= 0 violated");
    require(std::isfinite(spec.d_background) && spec.d_background >= 0, "comb: d_background >= 0 violated");
    require(spec.n_peaks >= 1, "comb: n_peaks >= 1 violated");
    require(spec.delta_hz >= spec.gamma_hz,
            "comb: finesse F = delta/gamma >= 1 violated (overlapping teeth)");
    require(spec.bandwidth_hz() <= limits.preparation_window_hz * (1 + 1e-12),
            "comb: bandwidth n_peaks*delta = " + std::to_string(spec.bandwidth_hz())
                + " Hz exceeds the preparation window of " + std::to_string(limits.preparation_window_hz) + " Hz");
    require(limits.samples_per_tooth >= 8, "comb: samples_per_tooth >= 8 violated");
}

struct AbsorptionProfile {
    std::vector<double> detunings_hz;
    std::vector<double> optical_depth;
    double grid_step_hz = 0.0;
    std::optional<CombSpec> source;  ///< spec that generated the profile, if any

    std::size_t size() const { return detunings_hz.size(); }

    /// Linear interpolation; zero outside the grid.
    double depth_at(double detuning_hz) const
    {
        if (detunings_hz.empty()) return 0.0;
        const double u = (detuning_hz - detunings_hz.front()) / grid_step_hz;
        if (u < 0 || u > static_cast<double>(size() - 1)) return 0.0;
        const auto i = std::min(static_cast<std::size_t>(u), size() - 2);
        const double f = u - static_cast<double>(i);
        return (1 - f) * optical_depth[i] + f * optical_depth[i + 1];
    }

    double max_depth() const
    {
        double m = 0.0;
        for (double d : optical_depth) m = std::max(m, d);
        return m;
    }
};

inline double finesse(const CombSpec& spec)
{
    require(spec.gamma_hz > 0, "finesse: gamma > 0 violated");
    return spec.delta_hz / spec.gamma_hz;
}

/// Area of one tooth of unit height divided by its FWHM.
inline double tooth_area_factor(PeakShape shape)
{
    switch (shape) {
    case PeakShape::gaussian: return std::sqrt(kPi / (4.0 * std::log(2.0)));
    case PeakShape::lorentzian: return kPi / 2.0;
    case PeakShape::square: return 1.0;
    }
    return 1.0;
}

/// Coarse-grained depth d_peak/F seen by a pulse spanning many teeth. Exact for square
/// teeth; multiply by tooth_area_factor(shape) for the period-averaged depth of the
/// other shapes.
inline double effective_depth(const CombSpec& spec)
{
    return spec.d_peak / finesse(spec);
}

inline int multimode_capacity(const CombSpec& spec, double mode_bandwidth_hz, double proportionality = 1.0)
{
    require(mode_bandwidth_hz > 0, "multimode_capacity: mode bandwidth must be positive");
    require(mode_bandwidth_hz <= spec.bandwidth_hz() * (1 + 1e-12),
            "multimode_capacity: mode bandwidth exceeds the comb bandwidth");
    require(proportionality > 0, "multimode_capacity: proportionality constant must be positive");
    return static_cast<int>(std::floor(proportionality * spec.bandwidth_hz() / spec.delta_hz + 1e-9));
}

namespace detail {

inline double tooth_value(PeakShape shape, double x, double gamma, double cell)
{
    switch (shape) {
    case PeakShape::gaussian: return std::exp(-4.0 * std::log(2.0) * x * x / (gamma * gamma));
    case PeakShape::lorentzian: return 1.0 / (1.0 + 4.0 * x * x / (gamma * gamma));
    case PeakShape::square: {
        // cell-averaged so the discrete integral is exact
        const double lo = std::max(x - 0.5 * cell, -0.5 * gamma);
        const double hi = std::min(x + 0.5 * cell, 0.5 * gamma);
        return std::max(0.0, hi - lo) / cell;
    }
    }
    return 0.0;
}

inline double band_value(double x, double half_width, double cell)
{
    const double lo = std::max(x - 0.5 * cell, -half_width);
    const double hi = std::min(x + 0.5 * cell, half_width);
    return std::max(0.0, hi - lo) / cell;
}

}  // namespace detail

/// Half-width of the sampled detuning range for a spec.
inline double profile_half_span_hz(const CombSpec& spec)
{
    const double half_band = 0.5 * spec.bandwidth_hz();
    switch (spec.peak_shape) {
    case PeakShape::gaussian: return half_band + 4.0 * spec.gamma_hz;
    case PeakShape::square: return half_band + spec.gamma_hz;
    case PeakShape::lorentzian: return 3.0 * spec.bandwidth_hz();
    }
    return half_band;
}

inline AbsorptionProfile build_comb(const CombSpec& spec, const CombLimits& limits = {})
{
    validate(spec, limits);
    AbsorptionProfile p;
    p.source = spec;
    p.grid_step_hz = spec.gamma_hz / limits.samples_per_tooth;
    const double h = p.grid_step_hz;
    const auto half_n = static_cast<long>(std::ceil(profile_half_span_hz(spec) / h));
    const std::size_t n = static_cast<std::size_t>(2 * half_n + 1);
    p.detunings_hz.resize(n);
    p.optical_depth.resize(n);
    const double half_band = 0.5 * spec.bandwidth_hz();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = spec.center_offset_hz + (static_cast<long>(i) - half_n) * h;
        double d = spec.d_background * detail::band_value(x - spec.center_offset_hz, half_band, h);
        if (spec.d_peak > 0) {
            for (int k = 0; k < spec.n_peaks; ++k) {
                d += spec.d_peak * detail::tooth_value(spec.peak_shape, x - spec.tooth_center_hz(k), spec.gamma_hz, h);
            }
        }
        p.detunings_hz[i] = x;
        p.optical_depth[i] = d;
    }
    return p;
}

/// Uniform absorber of depth d across [-bandwidth/2, bandwidth/2], sampled every step.
inline AbsorptionProfile flat_profile(double depth, double bandwidth_hz, double step_hz)
{
    require(depth >= 0 && std::isfinite(depth), "flat_profile: depth >= 0 violated");
    require(bandwidth_hz > 0 && step_hz > 0 && step_hz < bandwidth_hz, "flat_profile: invalid grid");
    AbsorptionProfile p;
    p.grid_step_hz = step_hz;
    const auto half_n = static_cast<long>(std::ceil(0.5 * bandwidth_hz / step_hz)) + 1;
    for (long i = -half_n; i <= half_n; ++i) {
        const double x = i * step_hz;
        p.detunings_hz.push_back(x);
        p.optical_depth.push_back(depth * detail::band_value(x, 0.5 * bandwidth_hz, step_hz));
    }
    return p;
}

inline void write_csv(std::ostream& os, const AbsorptionProfile& p)
{
    os << "detuning_Hz,optical_depth\n";
    os.precision(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << p.detunings_hz[i] << ',' << p.optical_depth[i] << '\n';
    }
}

}  // namespace afc
