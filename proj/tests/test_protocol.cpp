#include <cmath>

#include <gtest/gtest.h>

#include "afc/protocol.hpp"

using namespace afc;

namespace {

StorageSequence echo_sequence(double d_peak = 1.2)
{
    StorageSequence s;
    s.comb.d_peak = d_peak;
    s.grid = grid_preset(Resolution::fast);
    return s;
}

StorageSequence ideal_sequence(double t_s, double spin_fwhm = 0.0)
{
    auto s = echo_sequence();
    ControlSpec c;
    c.kind = ControlKind::ideal;
    s.control = c;
    s.t_s_s = t_s;
    s.spin_fwhm_hz = spin_fwhm;
    return s;
}

FieldRecord synthetic(const std::vector<std::pair<double, double>>& peaks, double width)
{
    FieldRecord r;
    r.t0 = 0.0;
    r.dt = 10e-9;
    r.n_slices = 1;
    r.n_t = 1000;
    r.field.assign(2 * r.n_t, Complex{});
    for (std::size_t i = 0; i < r.n_t; ++i) {
        double a = 0;
        for (const auto& [t, h] : peaks) a += h * std::exp(-2 * std::log(2.0) * std::pow((r.time(i) - t) / width, 2));
        r.field[r.n_t + i] = a;
    }
    return r;
}

}  // namespace

TEST(Grid, PresetsAndRefinement)
{
    const auto f = grid_preset(Resolution::fast);
    const auto r = grid_preset(Resolution::reference);
    const auto c = grid_preset(Resolution::converged);
    EXPECT_LT(f.n_slices, r.n_slices);
    EXPECT_LT(r.n_slices, c.n_slices);
    EXPECT_GT(f.dt_s, r.dt_s);
    const auto h = refined(r);
    EXPECT_EQ(h.n_slices, 2 * r.n_slices);
    EXPECT_DOUBLE_EQ(h.dt_s, 0.5 * r.dt_s);
    EXPECT_EQ(h.samples_per_tooth, r.samples_per_tooth);
    EXPECT_EQ(parse_resolution("converged"), Resolution::converged);
    EXPECT_FALSE(parse_resolution("coarse").has_value());
}

TEST(Validate, TimingConstraints)
{
    auto s = ideal_sequence(1e-6);
    EXPECT_NO_THROW(validate(s));
    s.t_s_s = -1e-6;
    EXPECT_THROW(validate(s), ValidationError);

    auto sech = echo_sequence();
    sech.control = ControlSpec{};
    sech.t_prime_s = 3.5e-6;  // T' + 600 ns > 1/Delta = 4 us
    EXPECT_THROW(validate(sech), ValidationError);
    sech.t_prime_s = 1.63e-6;
    EXPECT_NO_THROW(validate(sech));

    auto modes = echo_sequence();
    modes.mode_times_s = {1.5e-6, 1.7e-6};  // closer than one FWHM
    EXPECT_THROW(validate(modes), ValidationError);
    modes.mode_times_s = {0.5e-6};
    EXPECT_THROW(validate(modes), ValidationError);
}

TEST(Model, EfficiencyProduct)
{
    EXPECT_DOUBLE_EQ(efficiency_model(0.2, 1.0, 0.0, 26e3), 0.2);
    EXPECT_NEAR(efficiency_model(0.2, 0.75, 7.6e-6, 26e3), 0.2 * 0.5625 * dephasing_factor(26e3, 7.6e-6), 1e-15);
    EXPECT_THROW(efficiency_model(1.2, 0.5, 0.0, 0.0), ValidationError);
    EXPECT_THROW(efficiency_model(0.2, 0.5, -1.0, 0.0), ValidationError);
}

TEST(Detection, SinglePeakLocation)
{
    const auto r = synthetic({{3.337e-6, 1.0}}, 450e-9);
    const auto p = detect_peak(r, {1e-6, 9e-6}, 450e-9);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(p->time_s, 3.337e-6, 2e-9);
    EXPECT_FALSE(detect_peak(r, {1e-6, 9e-6}, 450e-9, 2.0).has_value());
}

TEST(Detection, MultiplePeaksSortedByTime)
{
    const auto r = synthetic({{2e-6, 0.5}, {5e-6, 1.0}, {7.5e-6, 0.2}}, 300e-9);
    const auto p = detect_peaks(r, {0.5e-6, 9.5e-6}, 300e-9, 2, 300e-9);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p[0].time_s, 2e-6, 5e-9);
    EXPECT_NEAR(p[1].time_s, 5e-6, 5e-9);
}

TEST(Builders, StableStepDividesPreset)
{
    auto s = echo_sequence();
    s.grid.dt_s = 100e-9;
    const auto m = make_medium(s);
    const double dt = stable_dt(s, m);
    EXPECT_LE(dt * 20 * m.max_abs_detuning_hz(), 1.0 + 1e-12);
    const double ratio = s.grid.dt_s / dt;
    EXPECT_NEAR(ratio, std::round(ratio), 1e-9);
}

TEST(Builders, MultimodeInputIsSumOfModes)
{
    auto s = echo_sequence();
    s.mode_times_s = {1.5e-6, 2.5e-6};
    const auto all = make_inputs(s);
    const auto a = make_input(s, 1.5e-6), b = make_input(s, 2.5e-6);
    for (double t : {1.2e-6, 1.5e-6, 2.0e-6, 2.6e-6}) EXPECT_NEAR(std::abs(all.at(t) - a.at(t) - b.at(t)), 0.0, 1e-6 * s.input_peak_hz);
}

TEST(Builders, WeightedTransferBounds)
{
    auto s = echo_sequence();
    const auto c = make_control(ControlSpec{}, 0.0, s.preparation_window_hz);
    const double w = weighted_transfer(s, c);
    EXPECT_GT(w, 0.5);
    EXPECT_LE(w, 1.0);
    auto weak = ControlSpec{};
    weak.peak_rabi_hz = 0.3e6;
    EXPECT_LT(weighted_transfer(s, make_control(weak, 0.0, s.preparation_window_hz)), w);
    ControlSpec ideal;
    ideal.kind = ControlKind::ideal;
    EXPECT_THROW(make_control(ideal, 0.0, s.preparation_window_hz), ValidationError);
}

TEST(Echo, DelayIsInversePeriod)
{
    const auto out = run_afc_echo(echo_sequence());
    const auto& r = out.report;
    ASSERT_TRUE(r.echo_delay_s.has_value());
    EXPECT_NEAR(*r.echo_delay_s, 4e-6, 0.02 * 4e-6);
    EXPECT_GT(r.eta_e, 0.0);
    EXPECT_LT(r.eta_e + r.transmitted, 1.0);
    EXPECT_EQ(r.eta_total, r.eta_e);
}

TEST(Echo, RejectsControls)
{
    EXPECT_THROW(run_afc_echo(ideal_sequence(1e-6)), ValidationError);
}

TEST(SpinWave, IdealControlsPreserveEchoEfficiency)
{
    const auto out = run_spinwave_storage(ideal_sequence(0.5e-6));
    const auto& r = out.report;
    ASSERT_FALSE(r.modes.empty());
    EXPECT_NEAR(r.eta_total / r.eta_e, 1.0, 0.02);
    EXPECT_DOUBLE_EQ(r.eta_T, 1.0);
    ASSERT_TRUE(r.echo_delay_s.has_value());
    EXPECT_NEAR(*r.echo_delay_s, 4e-6 + 0.5e-6, 0.02 * 4e-6);
}

TEST(SpinWave, TimingSumIsInversePeriod)
{
    const auto s = ideal_sequence(0.5e-6);
    const auto pts = timing_sweep(s, {1.0e-6, 2.0e-6});
    const auto echo = run_afc_echo(detail::without_controls(s));
    for (const auto& p : pts) {
        ASSERT_TRUE(p.t_double_prime_s.has_value());
        EXPECT_NEAR(p.t_prime_s + *p.t_double_prime_s, *echo.report.echo_time_s, 20e-9);
    }
}

TEST(SpinWave, InhomogeneousSpinDephasing)
{
    const double w = 26e3;
    const auto a = run_spinwave_storage(ideal_sequence(1e-6, w)).report;
    const auto b = run_spinwave_storage(ideal_sequence(8e-6, w)).report;
    const double expected = dephasing_factor(w, 8e-6) / dephasing_factor(w, 1e-6);
    EXPECT_NEAR(b.eta_total / a.eta_total, expected, 0.05 * expected);
}

TEST(Multimode, CapacityEnforced)
{
    auto s = ideal_sequence(0.5e-6);
    s.comb.n_peaks = 2;
    s.comb.delta_hz = 250e3;
    s.mode_times_s = {1.5e-6, 2.1e-6, 2.7e-6};
    s.t_prime_s = 2.0e-6;
    EXPECT_THROW(run_multimode(s), ValidationError);
    auto single = ideal_sequence(0.5e-6);
    single.mode_times_s = {1.5e-6, 2.5e-6};
    EXPECT_THROW(run_spinwave_storage(single), ValidationError);
}

TEST(Multimode, OutputIsSumOfSingleModeRuns)
{
    // linear weak-field response: two modes recalled together equal each mode stored alone
    // with the controls at the same absolute times
    auto both = ideal_sequence(2e-6);
    both.mode_times_s = {1.5e-6, 2.5e-6};
    both.t_prime_s = 2.0e-6;
    auto first = both, second = both;
    first.mode_times_s = {1.5e-6};
    second.mode_times_s = {2.5e-6};
    second.t_prime_s = 1.0e-6;
    const auto r = run_multimode(both).record;
    const auto a = run_spinwave_storage(first).record;
    const auto b = run_spinwave_storage(second).record;
    ASSERT_EQ(r.dt, a.dt);
    ASSERT_EQ(r.dt, b.dt);
    double peak = 0, err = 0;
    for (std::size_t i = 0; i < std::min({r.n_t, a.n_t, b.n_t}); ++i) {
        peak = std::max(peak, std::abs(r.output(i)));
        err = std::max(err, std::abs(r.output(i) - a.output(i) - b.output(i)));
    }
    EXPECT_LT(err, 1e-2 * peak);
}
