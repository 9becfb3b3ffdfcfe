#pragma once

// Storage scenarios built on the medium simulator: bare AFC echo, spin-wave storage with
// two control pulses, and multimode storage. Times in a report are measured from the
// centre of the first input mode unless stated otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "afc/atoms.hpp"
#include "afc/collective.hpp"
#include "afc/common.hpp"
#include "afc/medium.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

enum class Resolution { fast, reference, converged };

inline std::optional<Resolution> parse_resolution(std::string_view s)
{
    if (s == "fast") return Resolution::fast;
    if (s == "reference") return Resolution::reference;
    if (s == "converged") return Resolution::converged;
    return std::nullopt;
}

inline std::string_view to_string(Resolution r)
{
    switch (r) {
    case Resolution::fast: return "fast";
    case Resolution::reference: return "reference";
    case Resolution::converged: return "converged";
    }
    return "?";
}

struct GridSettings {
    int n_slices = 40;
    double dt_s = 10e-9;
    int samples_per_tooth = 16;
    int spin_nodes = 8;

    bool operator==(const GridSettings&) const = default;
};

inline GridSettings grid_preset(Resolution r)
{
    switch (r) {
    case Resolution::fast: return {24, 20e-9, 8, 6};
    case Resolution::reference: return {40, 10e-9, 16, 8};
    case Resolution::converged: return {80, 5e-9, 16, 10};
    }
    return {};
}

/// Halved dt and dz at the same spectral resolution.
inline GridSettings refined(GridSettings g)
{
    g.n_slices *= 2;
    g.dt_s *= 0.5;
    return g;
}

enum class ControlKind { sech, ideal, square };

inline std::optional<ControlKind> parse_control_kind(std::string_view s)
{
    if (s == "sech") return ControlKind::sech;
    if (s == "ideal") return ControlKind::ideal;
    if (s == "square") return ControlKind::square;
    return std::nullopt;
}

inline std::string_view to_string(ControlKind k)
{
    switch (k) {
    case ControlKind::sech: return "sech";
    case ControlKind::ideal: return "ideal";
    case ControlKind::square: return "square";
    }
    return "?";
}

struct ControlSpec {
    ControlKind kind = ControlKind::sech;
    double duration_s = 600e-9;
    double peak_rabi_hz = 1.2e6;
    double chirp_hz = 2e6;
    DurationConvention convention = DurationConvention::amplitude_fwhm;
    Direction direction = Direction::backward;

    /// Interval around the centre within which the pulse acts appreciably.
    double half_extent_s() const { return kind == ControlKind::ideal ? 0.0 : duration_s; }
};

struct StorageSequence {
    CombSpec comb;
    double preparation_window_hz = kDefaultPreparationWindowHz;

    double input_fwhm_s = 450e-9;
    double input_peak_hz = 1e3;  ///< weak-probe Rabi amplitude
    Direction input_direction = Direction::forward;
    /// Centres of the input modes; empty means one mode at 3 input FWHM.
    std::vector<double> mode_times_s;

    std::optional<ControlSpec> control;
    double t_prime_s = 1.63e-6;  ///< first input centre to first control centre
    double t_s_s = 0.0;          ///< control 1 centre to control 2 centre

    double spin_fwhm_hz = 0.0;
    SpinLineShape spin_shape = SpinLineShape::gaussian;
    double homogeneous_linewidth_hz = 1e3;
    double spin_linewidth_hz = 0.0;
    std::vector<double> control_profile;

    std::optional<Window> readout_window;
    GridSettings grid = grid_preset(Resolution::reference);

    std::vector<double> modes() const
    {
        return mode_times_s.empty() ? std::vector<double>{3.0 * input_fwhm_s} : mode_times_s;
    }
    double first_mode() const { return modes().front(); }
    double control1_time() const { return first_mode() + t_prime_s; }
    double control2_time() const { return control1_time() + t_s_s; }
};

inline void validate(const StorageSequence& seq)
{
    validate(seq.comb, CombLimits{seq.preparation_window_hz, seq.grid.samples_per_tooth});
    require(seq.input_fwhm_s > 0, "sequence: input FWHM > 0 violated");
    require(seq.input_peak_hz >= 0, "sequence: input peak >= 0 violated");
    require(seq.t_s_s >= 0, "sequence: T_s >= 0 violated");
    require(seq.spin_fwhm_hz >= 0, "sequence: spin_fwhm >= 0 violated");
    require(seq.grid.n_slices >= 20, "sequence: n_slices >= 20 violated");
    require(seq.grid.dt_s > 0, "sequence: dt > 0 violated");
    const auto modes = seq.modes();
    require(std::is_sorted(modes.begin(), modes.end()), "sequence: mode times must be increasing");
    require(modes.front() >= 2.5 * seq.input_fwhm_s, "sequence: first mode must start after t = 0 (centre >= 2.5 FWHM)");
    for (std::size_t i = 1; i < modes.size(); ++i) {
        require(modes[i] - modes[i - 1] >= seq.input_fwhm_s, "sequence: mode spacing >= input FWHM violated");
    }
    if (seq.control) {
        const auto& c = *seq.control;
        require(c.duration_s > 0 || c.kind == ControlKind::ideal, "sequence: control duration > 0 violated");
        require(seq.t_prime_s > 0, "sequence: T' > 0 violated");
        require(seq.t_prime_s + (c.kind == ControlKind::ideal ? 0.0 : c.duration_s) < seq.comb.period_s(),
                "sequence: T' + control duration < 1/Delta violated (first control too late)");
        if (c.kind == ControlKind::sech) {
            require(c.chirp_hz <= seq.preparation_window_hz, "sequence: chirp exceeds the preparation window");
        }
        const double last_input_end = modes.back() + 1.5 * seq.input_fwhm_s;
        require(last_input_end <= seq.control1_time() - 0.5 * c.half_extent_s(),
                "sequence: input modes overlap the first control pulse");
    }
}

struct ModeResult {
    double input_time_s = 0.0;
    double output_time_s = 0.0;  ///< absolute
    double storage_time_s = 0.0;  ///< output - input
    double efficiency = 0.0;
};

struct EfficiencyReport {
    double eta_e = 0.0;
    double eta_T = 1.0;
    double dephasing = 1.0;
    double eta_total = 0.0;
    std::optional<double> echo_time_s;  ///< output peak minus first input centre
    /// Peak of the transmitted first input mode at the output face, when detectable.
    std::optional<double> transmitted_peak_s;
    /// Output peak minus transmitted peak, the separation a detector behind the crystal sees.
    std::optional<double> echo_delay_s;
    double transmitted = 0.0;
    double eta_model = 0.0;
    double model_discrepancy = 0.0;  ///< |eta_total - eta_model|
    std::vector<ModeResult> modes;
};

/// eta_e * eta_T^2 * dephasing_factor(spin_fwhm, t_s).
inline double efficiency_model(double eta_e, double eta_T, double t_s, double spin_fwhm_hz,
                               SpinLineShape shape = SpinLineShape::gaussian)
{
    require(eta_e >= 0 && eta_e <= 1, "efficiency_model: eta_e in [0,1] violated");
    require(eta_T >= 0 && eta_T <= 1, "efficiency_model: eta_T in [0,1] violated");
    require(t_s >= 0, "efficiency_model: T_s >= 0 violated");
    return eta_e * eta_T * eta_T * dephasing_factor(spin_fwhm_hz, t_s, shape);
}

// ---- detection -------------------------------------------------------------------

/// Centred moving average over `width` samples (odd, >= 1).
inline std::vector<double> boxcar(const std::vector<double>& x, std::size_t width)
{
    width = std::max<std::size_t>(1, width | 1);
    const std::size_t half = width / 2;
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(x.size(), i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

struct Peak {
    double time_s = 0.0;
    double height = 0.0;
};

namespace detail {

inline double refine_parabolic(const std::vector<double>& y, std::size_t i, double t0, double dt)
{
    if (i == 0 || i + 1 >= y.size()) return t0 + static_cast<double>(i) * dt;
    const double a = y[i - 1], b = y[i], c = y[i + 1];
    const double den = a - 2 * b + c;
    const double off = den != 0.0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0;
    return t0 + (static_cast<double>(i) + off) * dt;
}

inline std::size_t boxcar_width(const FieldRecord& rec, double fwhm_s)
{
    return static_cast<std::size_t>(std::lround(fwhm_s / rec.dt)) | 1;
}

}  // namespace detail

/// Largest peak of the smoothed output intensity inside the window.
inline std::optional<Peak> detect_peak(const FieldRecord& rec, Window window, double smoothing_s, double floor = 0.0)
{
    const auto y = boxcar(rec.output_intensity(), detail::boxcar_width(rec, smoothing_s));
    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double t = rec.time(i);
        if (t < window.first || t > window.second) continue;
        if (y[i] >= y[i - 1] && y[i] >= y[i + 1] && (!best || y[i] > y[*best])) best = i;
    }
    if (!best || y[*best] <= floor) return std::nullopt;
    return Peak{detail::refine_parabolic(y, *best, rec.t0, rec.dt), y[*best]};
}

/// The m largest local maxima of the smoothed output intensity inside the window, at
/// least `separation` apart, sorted by time.
inline std::vector<Peak> detect_peaks(const FieldRecord& rec, Window window, double smoothing_s, std::size_t m,
                                      double separation_s)
{
    const auto y = boxcar(rec.output_intensity(), detail::boxcar_width(rec, smoothing_s));
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double t = rec.time(i);
        if (t < window.first || t > window.second) continue;
        if (y[i] >= y[i - 1] && y[i] > y[i + 1]) maxima.push_back(i);
    }
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
    std::vector<Peak> out;
    for (std::size_t i : maxima) {
        const double t = detail::refine_parabolic(y, i, rec.t0, rec.dt);
        const bool clear = std::all_of(out.begin(), out.end(), [&](const Peak& p) {
            return std::abs(p.time_s - t) >= separation_s;
        });
        if (clear) out.push_back({t, y[i]});
        if (out.size() == m) break;
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.time_s < b.time_s; });
    return out;
}

// ---- building blocks ---------------------------------------------------------------

inline double stable_dt(const StorageSequence& seq, const Medium1D& medium)
{
    double rate = std::max(medium.max_abs_detuning_hz(), seq.input_peak_hz);
    if (seq.control && seq.control->kind != ControlKind::ideal) rate = std::max(rate, seq.control->peak_rabi_hz);
    const double limit = rate > 0 ? 1.0 / (20.0 * rate) : seq.grid.dt_s;
    if (seq.grid.dt_s <= limit) return seq.grid.dt_s;
    // largest step dividing the preset step that meets the bound
    return seq.grid.dt_s / std::ceil(seq.grid.dt_s / limit);
}

inline Medium1D make_medium(const StorageSequence& seq)
{
    const auto profile = build_comb(seq.comb, CombLimits{seq.preparation_window_hz, seq.grid.samples_per_tooth});
    MediumOptions mo;
    mo.n_slices = seq.grid.n_slices;
    mo.homogeneous_linewidth_hz = seq.homogeneous_linewidth_hz;
    mo.spin_linewidth_hz = seq.spin_linewidth_hz;
    mo.spin_fwhm_hz = seq.control ? seq.spin_fwhm_hz : 0.0;
    mo.spin_shape = seq.spin_shape;
    mo.spin_nodes = seq.grid.spin_nodes;
    mo.control_profile = seq.control_profile;
    return build_medium(profile, mo);
}

inline PulseEnvelope make_input(const StorageSequence& seq, double t_center)
{
    return gaussian_pulse(seq.input_fwhm_s, Complex{seq.input_peak_hz, 0.0}, t_center, Transition::g_e,
                          seq.input_direction);
}

/// Sum of the input modes as one envelope on a common grid.
inline PulseEnvelope make_inputs(const StorageSequence& seq)
{
    const auto modes = seq.modes();
    if (modes.size() == 1) return make_input(seq, modes.front());
    const double dt = std::min(seq.input_fwhm_s / 100.0, 2e-9);
    const double lo = modes.front() - 2.6 * seq.input_fwhm_s;
    const double hi = modes.back() + 2.6 * seq.input_fwhm_s;
    PulseEnvelope out;
    out.dt = dt;
    out.t_start = std::floor(lo / dt) * dt;
    out.transition = Transition::g_e;
    out.direction = seq.input_direction;
    const auto n = static_cast<std::size_t>(std::ceil((hi - out.t_start) / dt)) + 1;
    out.samples.assign(n, Complex{});
    for (double tc : modes) {
        const auto p = make_input(seq, tc);
        for (std::size_t i = 0; i < n; ++i) out.samples[i] += p.at(out.time(i));
    }
    return out;
}

inline PulseEnvelope make_control(const ControlSpec& c, double t_center, double preparation_window_hz)
{
    switch (c.kind) {
    case ControlKind::sech: {
        SechOptions so;
        so.convention = c.convention;
        so.preparation_window_hz = preparation_window_hz;
        return sech_pulse(c.duration_s, c.peak_rabi_hz, c.chirp_hz, t_center, Transition::s_e, c.direction, so);
    }
    case ControlKind::square:
        return square_pulse(c.duration_s, c.peak_rabi_hz, t_center, Transition::s_e, c.direction);
    case ControlKind::ideal: break;
    }
    throw ValidationError("make_control: ideal controls have no envelope");
}

/// Single-pass e -> s transfer weighted by the comb depth times the input power spectrum.
inline double weighted_transfer(const StorageSequence& seq, const PulseEnvelope& control)
{
    const auto profile = build_comb(seq.comb, CombLimits{seq.preparation_window_hz, 8});
    const auto input = make_input(seq, 0.0);
    std::vector<double> det, w;
    double w_max = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double wi = profile.optical_depth[i] * std::norm(spectral_amplitude(input, profile.detunings_hz[i], 0.0));
        det.push_back(profile.detunings_hz[i]);
        w.push_back(wi);
        w_max = std::max(w_max, wi);
    }
    if (w_max <= 0) return 0.0;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 1e-6 * w_max) keep.push_back(i);
    }
    TransferOptions opts;
    opts.decay = Decay::none();
    const auto p = parallel_map<double>(keep.size(), [&](std::size_t k) {
        const FrequencyClass cls{det[keep[k]], 0.0, 1.0};
        AtomState excited;
        excited.g = 0.0;
        excited.e = 1.0;
        return transfer_efficiency(control, cls, excited, opts);
    });
    std::vector<double> num(keep.size()), den(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        num[k] = w[keep[k]] * p[k];
        den[k] = w[keep[k]];
    }
    return pairwise_sum<double>(num) / pairwise_sum<double>(den);
}

struct RunOutput {
    FieldRecord record;
    EfficiencyReport report;
};

// ---- scenarios ---------------------------------------------------------------------

inline RunOutput run_afc_echo(const StorageSequence& seq)
{
    require(!seq.control, "run_afc_echo: sequence must not contain controls");
    validate(seq);
    const auto medium = make_medium(seq);
    const auto input = make_inputs(seq);
    const double t_in = seq.first_mode();
    const double period = seq.comb.period_s();
    const double fw = seq.input_fwhm_s;
    const double t_end = seq.modes().back() + period + 4.0 * fw;
    PropagateOptions po;
    po.dt = stable_dt(seq, medium);
    RunOutput out{propagate(input, {}, medium, t_end, po), {}};
    const double e_in = input_energy(out.record);
    auto& r = out.report;
    r.transmitted = e_in > 0 ? transmitted_fraction(out.record, {t_in - 1.5 * fw, t_in + 1.5 * fw}) : 0.0;
    const double floor = 1e-8 * seq.input_peak_hz * seq.input_peak_hz;
    if (const auto tp = detect_peak(out.record, {t_in - fw, t_in + fw}, fw, floor)) r.transmitted_peak_s = tp->time_s;
    const Window search = seq.readout_window.value_or(Window{t_in + std::max(0.5 * period, 3.0 * fw), t_end - fw});
    if (const auto peak = detect_peak(out.record, search, fw, floor); peak && e_in > 0) {
        r.echo_time_s = peak->time_s - t_in;
        if (r.transmitted_peak_s) r.echo_delay_s = peak->time_s - *r.transmitted_peak_s;
        const Window echo{peak->time_s - 1.5 * fw, peak->time_s + 1.5 * fw};
        r.eta_e = afc_echo_efficiency(out.record, echo, e_in, Window{t_in - 1.5 * fw, t_in + 1.5 * fw});
        r.modes.push_back({t_in, peak->time_s, peak->time_s - t_in, r.eta_e});
    }
    r.eta_T = 1.0;
    r.eta_total = r.eta_e;
    r.eta_model = r.eta_e;
    return out;
}

namespace detail {

inline StorageSequence without_controls(StorageSequence seq)
{
    seq.control.reset();
    seq.mode_times_s = {seq.first_mode()};
    seq.readout_window.reset();
    return seq;
}

}  // namespace detail

/// Spin-wave storage of all input modes. The single-mode case is run_spinwave_storage.
inline RunOutput run_storage(const StorageSequence& seq)
{
    require(seq.control.has_value(), "run_spinwave_storage: sequence needs a control pulse spec");
    validate(seq);
    const auto modes = seq.modes();
    const auto& cs = *seq.control;
    const double fw = seq.input_fwhm_s;
    const double period = seq.comb.period_s();
    const double t1 = seq.control1_time();
    const double t2 = seq.control2_time();
    const double t_end = modes.back() + period + seq.t_s_s + 4.0 * fw;

    const auto medium = make_medium(seq);
    const auto input = make_inputs(seq);
    PropagateOptions po;
    po.dt = stable_dt(seq, medium);
    std::vector<PulseEnvelope> controls;
    double eta_T = 1.0;
    if (cs.kind == ControlKind::ideal) {
        po.ideal_transfers = {t1, t2};
    } else {
        controls.push_back(make_control(cs, t1, seq.preparation_window_hz));
        controls.push_back(make_control(cs, t2, seq.preparation_window_hz));
        eta_T = weighted_transfer(seq, controls.front());
    }

    // companion echo-only run for eta_e
    const auto echo_only = run_afc_echo(detail::without_controls(seq));

    RunOutput out{propagate(input, controls, medium, t_end, po), {}};
    auto& r = out.report;
    r.eta_e = echo_only.report.eta_e;
    r.eta_T = eta_T;
    r.dephasing = dephasing_factor(seq.spin_fwhm_hz, seq.t_s_s, seq.spin_shape);
    r.eta_model = efficiency_model(std::clamp(r.eta_e, 0.0, 1.0), std::clamp(eta_T, 0.0, 1.0), seq.t_s_s,
                                   seq.spin_fwhm_hz, seq.spin_shape);
    const double total_in = input_energy(out.record);
    const double per_mode_in = total_in / static_cast<double>(modes.size());
    r.transmitted = echo_only.report.transmitted;
    r.transmitted_peak_s = echo_only.report.transmitted_peak_s;

    const Window search = seq.readout_window.value_or(Window{t2 + cs.half_extent_s(), t_end - fw});
    const auto peaks = detect_peaks(out.record, search, fw, modes.size(), fw);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const auto& p = peaks[i];
        const Window w{p.time_s - 1.5 * fw, p.time_s + 1.5 * fw};
        const double eff = per_mode_in > 0 ? window_energy(out.record, w, out.record.n_slices) / per_mode_in : 0.0;
        const double t_input = i < modes.size() ? modes[i] : modes.back();
        r.modes.push_back({t_input, p.time_s, p.time_s - t_input, eff});
    }
    if (!r.modes.empty()) {
        r.eta_total = r.modes.front().efficiency;
        r.echo_time_s = r.modes.front().output_time_s - modes.front();
        if (r.transmitted_peak_s) r.echo_delay_s = r.modes.front().output_time_s - *r.transmitted_peak_s;
    }
    r.model_discrepancy = std::abs(r.eta_total - r.eta_model);
    return out;
}

inline RunOutput run_spinwave_storage(const StorageSequence& seq)
{
    require(seq.modes().size() == 1, "run_spinwave_storage: use run_multimode for more than one input mode");
    return run_storage(seq);
}

inline RunOutput run_multimode(const StorageSequence& seq)
{
    const auto m = static_cast<int>(seq.modes().size());
    require(m <= multimode_capacity(seq.comb, gaussian_spectral_fwhm(seq.input_fwhm_s)),
            "run_multimode: more modes than the multimode capacity");
    return run_storage(seq);
}

struct TimingPoint {
    double t_prime_s = 0.0;
    std::optional<double> t_double_prime_s;  ///< control 2 centre to output peak
};

inline std::vector<TimingPoint> timing_sweep(const StorageSequence& seq, const std::vector<double>& t_primes)
{
    return parallel_map<TimingPoint>(t_primes.size(), [&](std::size_t i) {
        StorageSequence s = seq;
        s.t_prime_s = t_primes[i];
        const auto run = run_spinwave_storage(s);
        TimingPoint tp{t_primes[i], std::nullopt};
        if (!run.report.modes.empty()) tp.t_double_prime_s = run.report.modes.front().output_time_s - s.control2_time();
        return tp;
    });
}

}  // namespace afc
