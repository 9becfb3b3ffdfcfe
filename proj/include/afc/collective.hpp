#pragma once

// Discrete-atom phasor model of the forward collective emission.
//
// After absorption each atom j carries an excitation amplitude c_j with optical detuning
// delta_j. In the forward direction the e^{-ikz_j} factors of absorption and emission
// cancel, so the emitted field is proportional to sum_j c_j e^{-i 2 pi delta_j t}. A comb
// density rephases this sum at t = 1/Delta. Storage intervals freeze the optical phase
// and let the spin phase e^{-i 2 pi eps_j t} accumulate instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "afc/common.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

enum class SpinLineShape { gaussian, lorentzian };

inline std::optional<SpinLineShape> parse_spin_line_shape(std::string_view s)
{
    if (s == "gaussian") return SpinLineShape::gaussian;
    if (s == "lorentzian") return SpinLineShape::lorentzian;
    return std::nullopt;
}

inline std::string_view to_string(SpinLineShape s) { return s == SpinLineShape::gaussian ? "gaussian" : "lorentzian"; }

struct SampledAtom {
    double optical_detuning_hz = 0.0;
    double spin_detuning_hz = 0.0;
    double z = 0.0;  ///< position as a fraction of the crystal length
    Complex c{};
};

struct StorageInterval {
    double start_s = 0.0;
    double duration_s = 0.0;
};

struct AtomSample {
    std::vector<SampledAtom> atoms;
    std::vector<StorageInterval> storage;
    std::optional<double> comb_period_s;

    std::size_t size() const { return atoms.size(); }
};

struct SampleOptions {
    SpinLineShape spin_shape = SpinLineShape::gaussian;
    /// When set, c_j follows the input's spectral amplitude; otherwise c_j is uniform.
    const PulseEnvelope* input = nullptr;
};

inline double gaussian_sigma_from_fwhm(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

inline AtomSample sample_atoms(const AbsorptionProfile& profile, double spin_fwhm_hz, std::size_t n,
                               std::uint64_t seed, const SampleOptions& options = {})
{
    require(n >= 1, "sample_atoms: n >= 1 violated");
    require(spin_fwhm_hz >= 0, "sample_atoms: spin_fwhm >= 0 violated");
    std::vector<double> cdf(profile.size());
    double total = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        total += std::max(0.0, profile.optical_depth[i]);
        cdf[i] = total;
    }
    require(total > 0, "sample_atoms: profile has zero optical depth everywhere");

    std::vector<double> spectral;
    double t_ref = 0.0;
    if (options.input != nullptr) {
        t_ref = pulse_centroid(*options.input);
        spectral.resize(profile.size());
        for (std::size_t i = 0; i < profile.size(); ++i) {
            spectral[i] = std::abs(spectral_amplitude(*options.input, profile.detunings_hz[i], t_ref));
        }
    }

    AtomSample out;
    out.atoms.resize(n);
    if (profile.source) out.comb_period_s = profile.source->period_s();
    Rng rng(seed);
    const double sigma = gaussian_sigma_from_fwhm(spin_fwhm_hz);
    const double h = profile.grid_step_hz;
    double norm = 0.0;
    for (auto& atom : out.atoms) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto cell = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size() - 1)));
        const double jitter = rng.uniform() - 0.5;
        atom.optical_detuning_hz = profile.detunings_hz[cell] + jitter * h;
        if (spin_fwhm_hz > 0) {
            if (options.spin_shape == SpinLineShape::gaussian) {
                atom.spin_detuning_hz = sigma * rng.normal();
            } else {
                atom.spin_detuning_hz = 0.5 * spin_fwhm_hz * std::tan(kPi * (rng.uniform() - 0.5));
            }
        }
        atom.z = rng.uniform();
        if (options.input != nullptr) {
            const double f = (atom.optical_detuning_hz - profile.detunings_hz.front()) / h;
            const auto i0 = static_cast<std::size_t>(std::clamp(std::floor(f), 0.0, static_cast<double>(profile.size() - 2)));
            const double w = std::clamp(f - static_cast<double>(i0), 0.0, 1.0);
            atom.c = (1 - w) * spectral[i0] + w * spectral[i0 + 1];
        } else {
            atom.c = 1.0;
        }
        norm += std::norm(atom.c);
    }
    const double scale = norm > 0 ? 1.0 / std::sqrt(norm) : 0.0;
    for (auto& atom : out.atoms) atom.c *= scale;
    return out;
}

namespace detail {

/// Optical and spin evolution times elapsed by time t, given the storage intervals.
inline std::pair<double, double> split_time(const AtomSample& sample, double t)
{
    double spin = 0.0;
    for (const auto& s : sample.storage) {
        const double lo = std::max(0.0, s.start_s);
        const double hi = std::min(t, s.start_s + s.duration_s);
        if (hi > lo) spin += hi - lo;
    }
    return {t - spin, spin};
}

}  // namespace detail

/// Normalized forward emission amplitude sum_j c_j e^{-i phase_j(t)} / sum_j c_j.
/// Bit-stable: fixed-size blocks, each summed pairwise, then summed pairwise.
inline Complex collective_amplitude(const AtomSample& sample, double t)
{
    const auto [t_opt, t_spin] = detail::split_time(sample, t);
    constexpr std::size_t kBlock = 4096;
    const std::size_t n_blocks = (sample.size() + kBlock - 1) / kBlock;
    auto block_sum = [&](std::size_t b, bool at_zero) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(sample.size(), lo + kBlock);
        std::vector<Complex> terms(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) {
            const auto& a = sample.atoms[j];
            terms[j - lo] = at_zero ? a.c
                                    : a.c * std::polar(1.0, -kTwoPi * (a.optical_detuning_hz * t_opt + a.spin_detuning_hz * t_spin));
        }
        return pairwise_sum<Complex>(terms);
    };
    const auto blocks = parallel_map<Complex>(n_blocks, [&](std::size_t b) { return block_sum(b, false); });
    const auto ref = parallel_map<Complex>(n_blocks, [&](std::size_t b) { return block_sum(b, true); });
    const Complex r = pairwise_sum<Complex>(ref);
    if (std::abs(r) == 0.0) return {};
    return pairwise_sum<Complex>(blocks) / r;
}

inline double collective_intensity(const AtomSample& sample, double t) { return std::norm(collective_amplitude(sample, t)); }

struct EchoSearch {
    double step_s = 10e-9;
    double floor = 1e-4;
};

/// Time of the largest collective revival inside the window, refined by golden-section
/// search around the best grid point. Empty when nothing rises above the floor.
inline std::optional<double> echo_time(const AtomSample& sample, std::pair<double, double> window,
                                       const EchoSearch& search = {})
{
    require(window.first > 0 && window.second > window.first, "echo_time: window must be (t0 > 0, t1 > t0)");
    require(search.step_s > 0, "echo_time: step must be positive");
    const auto n = static_cast<std::size_t>(std::ceil((window.second - window.first) / search.step_s)) + 1;
    const double h = (window.second - window.first) / static_cast<double>(n - 1);
    const auto values = parallel_map<double>(n, [&](std::size_t i) {
        return collective_intensity(sample, window.first + h * static_cast<double>(i));
    });
    const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    if (values[best] < search.floor) return std::nullopt;
    double a = window.first + h * (static_cast<double>(best) - 1.0);
    double b = window.first + h * (static_cast<double>(best) + 1.0);
    a = std::max(a, window.first);
    b = std::min(b, window.second);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = collective_intensity(sample, c), fd = collective_intensity(sample, d);
    for (int it = 0; it < 40 && (b - a) > 1e-13; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = collective_intensity(sample, c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = collective_intensity(sample, d);
        }
    }
    return 0.5 * (a + b);
}

/// Ideal transfer to |s> at t_prime and back after t_s.
inline AtomSample spin_freeze_resume(AtomSample sample, double t_prime, double t_s)
{
    require(t_s >= 0, "spin_freeze_resume: T_s >= 0 violated");
    require(t_prime > 0, "spin_freeze_resume: T' > 0 violated");
    if (sample.comb_period_s) {
        require(t_prime < *sample.comb_period_s, "spin_freeze_resume: T' >= 1/Delta (the echo has already left)");
    }
    if (!sample.storage.empty()) {
        const auto& last = sample.storage.back();
        require(t_prime >= last.start_s + last.duration_s, "spin_freeze_resume: storage intervals must be ordered");
    }
    sample.storage.push_back({t_prime, t_s});
    return sample;
}

/// |<exp(-i 2 pi eps t)>|^2 over the spin line. For a Gaussian of FWHM W this is
/// exp(-pi^2 W^2 t^2 / (2 ln 2)); for a Lorentzian exp(-2 pi W |t|).
inline double dephasing_factor(double spin_fwhm_hz, double t_s, SpinLineShape shape = SpinLineShape::gaussian)
{
    require(spin_fwhm_hz >= 0, "dephasing_factor: spin_fwhm >= 0 violated");
    if (shape == SpinLineShape::gaussian) {
        return std::exp(-kPi * kPi * spin_fwhm_hz * spin_fwhm_hz * t_s * t_s / (2.0 * std::log(2.0)));
    }
    return std::exp(-kTwoPi * spin_fwhm_hz * std::abs(t_s));
}

/// Inverse of the Gaussian dephasing law: FWHM from the slope b of ln(eta) = a - b T_s^2.
inline double spin_fwhm_from_gaussian_slope(double b)
{
    require(b >= 0, "spin_fwhm_from_gaussian_slope: slope must be non-negative");
    return std::sqrt(2.0 * std::log(2.0) * b) / kPi;
}

inline void write_trace_csv(std::ostream& os, const AtomSample& sample, std::span<const double> times)
{
    os << "t_s,intensity\n";
    os.precision(17);
    for (double t : times) os << t << ',' << collective_intensity(sample, t) << '\n';
}

inline void write_sample_csv(std::ostream& os, const AtomSample& sample)
{
    os << "optical_detuning_Hz,spin_detuning_Hz,z,re_c,im_c\n";
    os.precision(17);
    for (const auto& a : sample.atoms) {
        os << a.optical_detuning_hz << ',' << a.spin_detuning_hz << ',' << a.z << ',' << a.c.real() << ','
           << a.c.imag() << '\n';
    }
}

}  // namespace afc
