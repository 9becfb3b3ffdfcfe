#pragma once

// One-dimensional Maxwell-Bloch propagation of a weak forward field through the comb.
//
// The crystal is cut into n slices of normalized length dz = 1/n. Each slice holds the
// same set of frequency classes; class j carries weight w_j = d(delta_j) * step (Hz),
// so sum_j w_j f(delta_j) approximates the integral of d(delta) f(delta). In a frame
// co-moving with the light the field obeys
//
//     dE/dz = -(i/pi) sum_j w_j c_e,j conj(c_g,j)
//
// which gives a weak monochromatic probe the amplitude transmission exp(-d(delta)/2).
// Within one slice the polarization is constant and the atoms see the slice-midpoint
// field, so |E_out|^2 - |E_in|^2 equals the atomic energy change exactly. Controls on
// the s-e transition are prescribed, undepleted and uniform along z unless a control
// profile is given.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "afc/atoms.hpp"
#include "afc/collective.hpp"
#include "afc/common.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

using Window = std::pair<double, double>;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;  ///< sum to 1
};

/// Gauss-Hermite rule for a standard normal variable (Golub-Welsch).
inline QuadratureRule gauss_hermite_normal(int n)
{
    require(n >= 1, "gauss_hermite_normal: n >= 1 violated");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    for (int k = 0; k < n; ++k) {
        rule.nodes.push_back(solver.eigenvalues()(k));
        const double v = solver.eigenvectors()(0, k);
        rule.weights.push_back(v * v);
    }
    return rule;
}

/// Discretization of a spin line into weighted nodes (Hz).
inline QuadratureRule spin_quadrature(double fwhm_hz, int nodes, SpinLineShape shape)
{
    if (fwhm_hz <= 0 || nodes <= 1) return {{0.0}, {1.0}};
    QuadratureRule rule;
    if (shape == SpinLineShape::gaussian) {
        rule = gauss_hermite_normal(nodes);
        const double sigma = gaussian_sigma_from_fwhm(fwhm_hz);
        for (double& x : rule.nodes) x *= sigma;
    } else {
        // equal-weight quantile midpoints of the Lorentzian
        for (int k = 0; k < nodes; ++k) {
            const double u = (k + 0.5) / nodes;
            rule.nodes.push_back(0.5 * fwhm_hz * std::tan(kPi * (u - 0.5)));
            rule.weights.push_back(1.0 / nodes);
        }
    }
    return rule;
}

struct MediumOptions {
    int n_slices = 50;
    double homogeneous_linewidth_hz = 1e3;
    double spin_linewidth_hz = 0.0;
    double spin_fwhm_hz = 0.0;
    SpinLineShape spin_shape = SpinLineShape::gaussian;
    int spin_nodes = 8;
    /// Per-slice control amplitude factor; empty means uniform 1.
    std::vector<double> control_profile;
};

struct Medium1D {
    int n_slices = 50;
    std::vector<FrequencyClass> classes;
    double grid_step_hz = 0.0;
    Decay decay;
    std::vector<double> control_profile;

    double dz() const { return 1.0 / n_slices; }

    double max_abs_detuning_hz() const
    {
        double m = 0.0;
        for (const auto& c : classes) {
            m = std::max({m, std::abs(c.optical_detuning_hz), std::abs(c.spin_detuning_hz),
                          std::abs(c.optical_detuning_hz - c.spin_detuning_hz)});
        }
        return m;
    }

    std::pair<double, double> optical_extent_hz() const
    {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto& c : classes) {
            if (first) {
                lo = hi = c.optical_detuning_hz;
                first = false;
            }
            lo = std::min(lo, c.optical_detuning_hz);
            hi = std::max(hi, c.optical_detuning_hz);
        }
        return {lo, hi};
    }
};

inline Medium1D build_medium(const AbsorptionProfile& profile, const MediumOptions& options = {})
{
    require(options.n_slices >= 20, "medium: n_slices >= 20 violated");
    require(profile.grid_step_hz > 0 && profile.size() >= 2, "medium: empty absorption profile");
    if (profile.source) {
        require(profile.grid_step_hz <= profile.source->gamma_hz / 8.0 * (1 + 1e-9),
                "medium: fewer than 8 frequency classes per comb tooth");
    }
    for (double d : profile.optical_depth) {
        require(std::isfinite(d) && d >= 0, "medium: optical depth must be finite and non-negative");
    }
    require(options.control_profile.empty()
                || options.control_profile.size() == static_cast<std::size_t>(options.n_slices),
            "medium: control_profile must have one entry per slice");
    Medium1D m;
    m.n_slices = options.n_slices;
    m.grid_step_hz = profile.grid_step_hz;
    m.decay = Decay{options.homogeneous_linewidth_hz, options.spin_linewidth_hz};
    m.control_profile = options.control_profile.empty()
                            ? std::vector<double>(static_cast<std::size_t>(options.n_slices), 1.0)
                            : options.control_profile;
    const auto spin = spin_quadrature(options.spin_fwhm_hz, options.spin_nodes, options.spin_shape);
    const double cutoff = 1e-12 * std::max(profile.max_depth(), 1e-300);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double d = profile.optical_depth[i];
        if (d <= cutoff) continue;
        for (std::size_t k = 0; k < spin.nodes.size(); ++k) {
            m.classes.push_back({profile.detunings_hz[i], spin.nodes[k], d * profile.grid_step_hz * spin.weights[k]});
        }
    }
    return m;
}

struct FieldRecord {
    double t0 = 0.0;
    double dt = 0.0;
    int n_slices = 0;
    std::size_t n_t = 0;
    /// (n_slices + 1) x n_t, row k is the slice boundary at z = k/n_slices.
    std::vector<Complex> field;
    Direction emission_direction = Direction::forward;
    /// Atomic excitation left at t_end, in field-energy units.
    double residual_excitation = 0.0;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    Complex at(int slice, std::size_t i) const { return field[static_cast<std::size_t>(slice) * n_t + i]; }
    Complex input(std::size_t i) const { return at(0, i); }
    Complex output(std::size_t i) const { return at(n_slices, i); }

    std::vector<double> intensity(int slice) const
    {
        std::vector<double> out(n_t);
        for (std::size_t i = 0; i < n_t; ++i) out[i] = std::norm(at(slice, i));
        return out;
    }
    std::vector<double> output_intensity() const { return intensity(n_slices); }
};

/// Emission direction from k_out = k_in - k_c1 + k_c2.
inline Direction phase_match_direction(Direction k_in, Direction k_c1, Direction k_c2)
{
    auto sign = [](Direction d) { return d == Direction::forward ? 1 : -1; };
    return sign(k_in) - sign(k_c1) + sign(k_c2) > 0 ? Direction::forward : Direction::backward;
}

struct PropagateOptions {
    double dt = 10e-9;
    double t_start = 0.0;
    /// Instantaneous resonant pi rotations on s-e (ideal control pulses), in time order.
    std::vector<double> ideal_transfers;
};

namespace detail {

inline double amplitude_fwhm_s(const PulseEnvelope& p)
{
    const double peak = p.peak();
    if (peak <= 0) return 0.0;
    std::size_t lo = p.size(), hi = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::abs(p.samples[i]) >= 0.5 * peak) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    return static_cast<double>(hi - lo + 1) * p.dt;
}

/// Spectral half-extent of a pulse about its carrier: largest instantaneous frequency
/// where it is strong, plus its transform-limited bandwidth.
inline double spectral_half_extent_hz(const PulseEnvelope& p)
{
    const double peak = p.peak();
    double f = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::abs(p.samples[i]) >= 0.01 * peak) f = std::max(f, std::abs(instantaneous_frequency(p, p.time(i))));
    }
    const double w = amplitude_fwhm_s(p);
    return f + (w > 0 ? 1.0 / w : 0.0);
}

}  // namespace detail

inline FieldRecord propagate(const PulseEnvelope& input, const std::vector<PulseEnvelope>& controls,
                             const Medium1D& medium, double t_end, const PropagateOptions& options = {})
{
    require(input.transition == Transition::g_e, "propagate: input must target the g_e transition");
    require(options.dt > 0 && t_end > options.t_start, "propagate: need dt > 0 and t_end > t_start");
    require(static_cast<int>(medium.control_profile.size()) == medium.n_slices, "propagate: malformed medium");
    Direction emission = input.direction;
    for (std::size_t c = 0; c < controls.size(); ++c) {
        require(controls[c].transition == Transition::s_e, "propagate: controls must target the s_e transition");
        require(controls[c].direction == controls.front().direction,
                "propagate: controls with different directions emit backward; backward emission is not simulated");
    }
    if (controls.size() >= 2) {
        emission = phase_match_direction(input.direction, controls[0].direction, controls[1].direction);
    }
    // controls must stay spectrally clear of the comb
    if (!medium.classes.empty()) {
        const auto [lo, hi] = medium.optical_extent_hz();
        const double comb_lo = lo + input.carrier_detuning_hz;
        const double comb_hi = hi + input.carrier_detuning_hz;
        for (const auto& c : controls) {
            const double half = detail::spectral_half_extent_hz(c);
            const double c_lo = c.carrier_detuning_hz - half;
            const double c_hi = c.carrier_detuning_hz + half;
            require(c_hi < comb_lo || c_lo > comb_hi,
                    "propagate: control spectrum overlaps the g_e comb (ambiguous frame)");
        }
    }
    double rate = std::max(medium.max_abs_detuning_hz(), input.peak());
    for (const auto& c : controls) rate = std::max(rate, c.peak() + std::abs(c.residual_detuning_hz()));
    if (rate > 0 && options.dt * 20.0 * rate > 1.0 + 1e-9) {
        throw NumericsError("propagate: dt = " + std::to_string(options.dt) + " s violates the stability bound "
                            + std::to_string(1.0 / (20.0 * rate)) + " s");
    }

    const int S = medium.n_slices;
    const std::size_t M = medium.classes.size();
    const std::size_t N = static_cast<std::size_t>(S) * M;
    const double dz = medium.dz();
    const double dt = options.dt;
    const auto n_steps = static_cast<std::size_t>(std::ceil((t_end - options.t_start) / dt - 1e-9));

    FieldRecord rec;
    rec.t0 = options.t_start;
    rec.dt = dt;
    rec.n_slices = S;
    rec.n_t = n_steps + 1;
    rec.field.assign(static_cast<std::size_t>(S + 1) * rec.n_t, Complex{});
    rec.emission_direction = emission;

    std::vector<Complex> rot_e(M), rot_s(M);
    std::vector<double> weight(M);
    const double pe = kPi * medium.decay.optical_linewidth_hz;
    const double ps = kPi * medium.decay.spin_linewidth_hz;
    for (std::size_t j = 0; j < M; ++j) {
        rot_e[j] = Complex{-pe, -kTwoPi * medium.classes[j].optical_detuning_hz};
        rot_s[j] = Complex{-ps, -kTwoPi * medium.classes[j].spin_detuning_hz};
        weight[j] = medium.classes[j].weight;
    }

    std::vector<Amplitudes> y(N, Amplitudes{Complex{1.0, 0.0}, Complex{}, Complex{}});
    std::vector<Amplitudes> stage(N), k(N), acc(N);
    std::vector<Complex> polarization(static_cast<std::size_t>(S));
    std::vector<Complex> e_boundary(static_cast<std::size_t>(S + 1));
    std::vector<Complex> e_mid(static_cast<std::size_t>(S));

    auto control_field = [&](double t) {
        Complex v{};
        for (const auto& c : controls) {
            Complex f = c.at(t);
            const double r = c.residual_detuning_hz();
            if (r != 0.0) f *= std::polar(1.0, -kTwoPi * r * t);
            v += f;
        }
        return v;
    };

    // Fields from an atomic state at time t, then dy/dt into out.
    auto evaluate = [&](const std::vector<Amplitudes>& state, double t, std::vector<Amplitudes>* out) {
        parallel_for(static_cast<std::size_t>(S), [&](std::size_t sl) {
            const Amplitudes* a = state.data() + sl * M;
            Complex p{};
            for (std::size_t j = 0; j < M; ++j) p += weight[j] * a[j].e * std::conj(a[j].g);
            polarization[sl] = p;
        });
        e_boundary[0] = input.at(t);
        const Complex coupling = -kI * dz / kPi;
        for (int sl = 0; sl < S; ++sl) {
            const auto u = static_cast<std::size_t>(sl);
            e_mid[u] = e_boundary[u] + 0.5 * coupling * polarization[u];
            e_boundary[u + 1] = e_boundary[u] + coupling * polarization[u];
        }
        if (out == nullptr) return;
        const Complex omega_c = control_field(t);
        parallel_for(static_cast<std::size_t>(S), [&](std::size_t sl) {
            const Complex eg = e_mid[sl];
            const Complex es = omega_c * medium.control_profile[sl];
            const Complex ieg = -kI * kPi * eg;
            const Complex ies = -kI * kPi * es;
            const Complex ieg_c = -kI * kPi * std::conj(eg);
            const Complex ies_c = -kI * kPi * std::conj(es);
            const Amplitudes* a = state.data() + sl * M;
            Amplitudes* d = out->data() + sl * M;
            for (std::size_t j = 0; j < M; ++j) {
                d[j].g = ieg_c * a[j].e;
                d[j].s = rot_s[j] * a[j].s + ies_c * a[j].e;
                d[j].e = rot_e[j] * a[j].e + ieg * a[j].g + ies * a[j].s;
            }
        });
    };

    auto store_fields = [&](std::size_t step) {
        for (int sl = 0; sl <= S; ++sl) {
            rec.field[static_cast<std::size_t>(sl) * rec.n_t + step] = e_boundary[static_cast<std::size_t>(sl)];
        }
    };

    std::size_t next_transfer = 0;
    auto apply_ideal_transfers = [&](double t_now) {
        while (next_transfer < options.ideal_transfers.size()
               && options.ideal_transfers[next_transfer] <= t_now + 0.5 * dt) {
            parallel_for(static_cast<std::size_t>(S), [&](std::size_t sl) {
                const double theta = kPi * medium.control_profile[sl];
                const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
                Amplitudes* a = y.data() + sl * M;
                for (std::size_t j = 0; j < M; ++j) {
                    const Complex as = a[j].s, ae = a[j].e;
                    a[j].s = c * as - kI * s * ae;
                    a[j].e = c * ae - kI * s * as;
                }
            });
            ++next_transfer;
        }
    };

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = options.t_start + static_cast<double>(step) * dt;
        apply_ideal_transfers(t);
        // k1
        evaluate(y, t, &k);
        store_fields(step);
        auto combine = [&](double h_stage, double w_acc, bool first) {
            parallel_for(static_cast<std::size_t>(S), [&](std::size_t sl) {
                for (std::size_t i = sl * M; i < (sl + 1) * M; ++i) {
                    if (first) {
                        acc[i] = {w_acc * k[i].g, w_acc * k[i].s, w_acc * k[i].e};
                    } else {
                        acc[i].g += w_acc * k[i].g;
                        acc[i].s += w_acc * k[i].s;
                        acc[i].e += w_acc * k[i].e;
                    }
                    if (h_stage > 0) {
                        stage[i] = {y[i].g + h_stage * k[i].g, y[i].s + h_stage * k[i].s, y[i].e + h_stage * k[i].e};
                    }
                }
            });
        };
        combine(0.5 * dt, 1.0, true);
        evaluate(stage, t + 0.5 * dt, &k);
        combine(0.5 * dt, 2.0, false);
        evaluate(stage, t + 0.5 * dt, &k);
        combine(dt, 2.0, false);
        evaluate(stage, t + dt, &k);
        combine(0.0, 1.0, false);
        parallel_for(static_cast<std::size_t>(S), [&](std::size_t sl) {
            for (std::size_t i = sl * M; i < (sl + 1) * M; ++i) {
                y[i].g += dt / 6.0 * acc[i].g;
                y[i].s += dt / 6.0 * acc[i].s;
                y[i].e += dt / 6.0 * acc[i].e;
            }
        });
    }
    const double t_last = options.t_start + static_cast<double>(n_steps) * dt;
    apply_ideal_transfers(t_last);
    evaluate(y, t_last, nullptr);
    store_fields(n_steps);

    double residual = 0.0;
    for (int sl = 0; sl < S; ++sl) {
        double slice = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            const auto& a = y[static_cast<std::size_t>(sl) * M + j];
            slice += weight[j] * (std::norm(a.e) + std::norm(a.s));
        }
        residual += slice * dz;
    }
    rec.residual_excitation = residual / (kPi * kPi);
    return rec;
}

/// Integral of |E|^2 over the part of the window covered by the record, at one face.
inline double window_energy(const FieldRecord& rec, Window window, int slice)
{
    require(window.second > window.first, "window_energy: empty window");
    double acc = 0.0;
    for (std::size_t i = 0; i < rec.n_t; ++i) {
        const double t = rec.time(i);
        if (t < window.first || t > window.second) continue;
        const double w = (i == 0 || i + 1 == rec.n_t) ? 0.5 : 1.0;
        acc += w * std::norm(rec.at(slice, i));
    }
    return acc * rec.dt;
}

inline double output_energy(const FieldRecord& rec)
{
    return trapezoid(rec.output_intensity(), rec.dt);
}

inline double input_energy(const FieldRecord& rec)
{
    return trapezoid(rec.intensity(0), rec.dt);
}

inline double afc_echo_efficiency(const FieldRecord& rec, Window echo_window, double input_energy_value,
                                  std::optional<Window> transmitted_window = std::nullopt)
{
    require(input_energy_value > 0, "afc_echo_efficiency: input energy must be positive");
    if (transmitted_window) {
        require(echo_window.first >= transmitted_window->second || echo_window.second <= transmitted_window->first,
                "afc_echo_efficiency: echo window overlaps the transmitted-pulse window");
    }
    return window_energy(rec, echo_window, rec.n_slices) / input_energy_value;
}

/// Output energy inside the window over the total input energy.
inline double transmitted_fraction(const FieldRecord& rec, Window input_window)
{
    const double in = input_energy(rec);
    require(in > 0, "transmitted_fraction: record carries no input energy");
    return window_energy(rec, input_window, rec.n_slices) / in;
}

/// |E_out(nu)|^2 / |E_in(nu)|^2 from the recorded faces (weak-probe transfer function).
inline std::vector<double> power_transmission(const FieldRecord& rec, const std::vector<double>& frequencies_hz)
{
    return parallel_map<double>(frequencies_hz.size(), [&](std::size_t f) {
        Complex in{}, out{};
        for (std::size_t i = 0; i < rec.n_t; ++i) {
            const Complex ph = std::polar(1.0, kTwoPi * frequencies_hz[f] * rec.time(i));
            in += rec.input(i) * ph;
            out += rec.output(i) * ph;
        }
        return std::norm(out) / std::norm(in);
    });
}

inline void write_csv(std::ostream& os, const FieldRecord& rec)
{
    os << "time_s,re,im,intensity\n";
    os.precision(17);
    for (std::size_t i = 0; i < rec.n_t; ++i) {
        const Complex e = rec.output(i);
        os << rec.time(i) << ',' << e.real() << ',' << e.imag() << ',' << std::norm(e) << '\n';
    }
}

}  // namespace afc
