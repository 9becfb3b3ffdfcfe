#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "afc/pulses.hpp"

using namespace afc;

namespace {

double measured_fwhm(const PulseEnvelope& p)
{
    const double half = 0.5 * p.peak();
    double first = -1, last = -1;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double a = std::abs(p.samples[i - 1]), b = std::abs(p.samples[i]);
        if (a < half && b >= half) first = p.time(i - 1) + (half - a) / (b - a) * p.dt;
        if (a >= half && b < half) last = p.time(i - 1) + (a - half) / (a - b) * p.dt;
    }
    return last - first;
}

}  // namespace

TEST(Gaussian, SpectralWidthOfPaperInput)
{
    EXPECT_NEAR(gaussian_spectral_fwhm(450e-9), 0.98e6, 0.005e6);
    EXPECT_LT(gaussian_spectral_fwhm(450e-9), 2e6);
}

TEST(Gaussian, MeasuredFwhmMatchesRequest)
{
    for (double fwhm : {100e-9, 450e-9, 1e-6}) {
        const auto p = gaussian_pulse(fwhm, Complex{1.0, 0.0}, 2e-6);
        EXPECT_NEAR(measured_fwhm(p), fwhm, p.dt);
    }
}

TEST(Gaussian, ZeroAmplitudeIsZero)
{
    const auto p = gaussian_pulse(450e-9, Complex{}, 1e-6);
    for (const auto& s : p.samples) EXPECT_EQ(s, Complex{});
    EXPECT_EQ(pulse_area(p), 0.0);
}

TEST(Gaussian, EdgesBelowThreshold)
{
    const auto p = gaussian_pulse(450e-9, Complex{1.0, 0.0}, 1e-6);
    EXPECT_LT(std::abs(p.samples.front()), 1e-4);
    EXPECT_LT(std::abs(p.samples.back()), 1e-4);
}

TEST(Gaussian, SpectrumMatchesAnalyticTransform)
{
    const double fwhm = 450e-9;
    const auto p = gaussian_pulse(fwhm, Complex{1.0, 0.0}, 0.0);
    const double a = 4 * std::log(2.0) / (fwhm * fwhm);
    for (double nu : {0.0, 0.3e6, 0.8e6}) {
        const double analytic = std::sqrt(kPi / a) * std::exp(-kPi * kPi * nu * nu / a);
        EXPECT_NEAR(std::abs(spectral_amplitude(p, nu, 0.0)), analytic, 1e-6 * std::sqrt(kPi / a));
    }
}

TEST(Sech, EnvelopeAndTimeConstant)
{
    const double duration = 600e-9;
    const auto p = sech_pulse(duration, 1.2e6, 2e6, 0.0);
    EXPECT_EQ(p.transition, Transition::s_e);
    EXPECT_EQ(p.direction, Direction::backward);
    EXPECT_NEAR(p.peak(), 1.2e6, 1.0);
    EXPECT_NEAR(measured_fwhm(p), duration, p.dt);
    EXPECT_NEAR(p.carrier_detuning_hz, -10.2e6, 1e-6);
    EXPECT_EQ(p.residual_detuning_hz(), 0.0);
    const auto q = sech_pulse(duration, 1.2e6, 2e6, 0.0, Transition::s_e, Direction::backward,
                              SechOptions{DurationConvention::time_constant, 18e6, {}});
    EXPECT_NEAR(measured_fwhm(q), 2 * std::acosh(2.0) * duration, q.dt);
}

TEST(Sech, InstantaneousFrequencyFollowsTanh)
{
    const double duration = 600e-9, chirp = 2e6;
    const auto p = sech_pulse(duration, 1.2e6, chirp, 0.0);
    const double tau = sech_time_constant(duration, DurationConvention::amplitude_fwhm);
    EXPECT_NEAR(instantaneous_frequency(p, 0.0), 0.0, 1.0);
    EXPECT_NEAR(instantaneous_frequency(p, 3 * tau), 0.5 * chirp * std::tanh(3.0), 0.01 * 0.5 * chirp);
    EXPECT_NEAR(instantaneous_frequency(p, -3 * tau), -0.5 * chirp * std::tanh(3.0), 0.01 * 0.5 * chirp);
    for (double x = -2.0; x <= 2.0; x += 0.1) {
        const double expected = 0.5 * chirp * std::tanh(x);
        EXPECT_NEAR(instantaneous_frequency(p, x * tau), expected, 0.01 * 0.5 * chirp);
    }
    // total sweep equals the chirp width
    EXPECT_NEAR(instantaneous_frequency(p, p.t_end() - p.dt) - instantaneous_frequency(p, p.t_start + p.dt), chirp,
                1e-3 * chirp);
}

TEST(Sech, UnchirpedIsReal)
{
    const auto p = sech_pulse(600e-9, 1e6, 0.0, 0.0);
    for (const auto& s : p.samples) EXPECT_EQ(s.imag(), 0.0);
}

TEST(Sech, TimeReversalSymmetry)
{
    const auto p = sech_pulse(600e-9, 1.2e6, 2e6, 0.0);
    const double tau = sech_time_constant(600e-9, DurationConvention::amplitude_fwhm);
    for (double x : {0.3, 1.0, 2.5, 4.0}) {
        const Complex a = p.at(x * tau), b = p.at(-x * tau);
        EXPECT_NEAR(std::abs(a), std::abs(b), 1e-9 * p.peak());
        EXPECT_NEAR(std::arg(a), std::arg(b), 1e-9);
    }
}

TEST(Sech, ChirpBeyondPreparationWindowRejected)
{
    EXPECT_THROW(sech_pulse(600e-9, 1.2e6, 20e6, 0.0), ValidationError);
    EXPECT_THROW(sech_pulse(-1e-9, 1.2e6, 2e6, 0.0), ValidationError);
}

TEST(Area, SquarePiPulse)
{
    const auto p = square_pulse(500e-9, Complex{1e6, 0.0}, 1e-6);
    EXPECT_NEAR(pulse_area(p), kPi, 1e-12);
}

TEST(Area, PaperSechAnalytic)
{
    const double duration = 600e-9, rabi = 1.2e6;
    const auto p = sech_pulse(duration, rabi, 2e6, 0.0);
    const double tau = sech_time_constant(duration, DurationConvention::amplitude_fwhm);
    const double analytic = kTwoPi * rabi * tau * kPi;
    EXPECT_NEAR(pulse_area(p) / analytic, 1.0, 1e-3);
}

TEST(Area, GridRefinement)
{
    const double duration = 600e-9;
    const double tau = sech_time_constant(duration, DurationConvention::amplitude_fwhm);
    SechOptions coarse;
    coarse.grid.dt = tau / 50;
    SechOptions fine;
    fine.grid.dt = tau / 100;
    const double a = pulse_area(sech_pulse(duration, 1.2e6, 2e6, 0.0, Transition::s_e, Direction::backward, coarse));
    const double b = pulse_area(sech_pulse(duration, 1.2e6, 2e6, 0.0, Transition::s_e, Direction::backward, fine));
    EXPECT_LT(std::abs(a - b) / b, 1e-4);
}

TEST(InstantaneousFrequency, GaussianIsZeroAndOutsideThrows)
{
    const auto p = gaussian_pulse(450e-9, Complex{2.0, 0.0}, 0.0);
    for (double t = -600e-9; t <= 600e-9; t += 100e-9) EXPECT_EQ(instantaneous_frequency(p, t), 0.0);
    EXPECT_THROW(instantaneous_frequency(p, 10e-6), ValidationError);
}

TEST(Envelope, TagsPreservedAndInterpolation)
{
    const auto p = gaussian_pulse(450e-9, Complex{1.0, 0.0}, 0.0, Transition::g_e, Direction::backward);
    EXPECT_EQ(p.direction, Direction::backward);
    EXPECT_EQ(p.transition, Transition::g_e);
    const double a = 4 * std::log(2.0) / (450e-9 * 450e-9);
    const double t = 0.37 * p.dt + 50e-9;
    EXPECT_NEAR(p.at(t).real(), std::exp(-a * t * t), 1e-8);
    EXPECT_EQ(p.at(1.0), Complex{});
}

TEST(Envelope, CsvExport)
{
    std::ostringstream os;
    write_csv(os, gaussian_pulse(450e-9, Complex{1.0, 0.0}, 0.0));
    EXPECT_EQ(os.str().rfind("t_s,re,im\n", 0), 0u);
}
