#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "afc/spectral.hpp"

using namespace afc;

namespace {

CombSpec paper_comb()
{
    CombSpec c;
    c.delta_hz = 250e3;
    c.gamma_hz = 100e3;
    c.d_peak = 4.0;
    c.n_peaks = 9;
    return c;
}

std::vector<std::size_t> local_maxima(const AbsorptionProfile& p)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p.optical_depth[i] > p.optical_depth[i - 1] && p.optical_depth[i] >= p.optical_depth[i + 1]) idx.push_back(i);
    }
    return idx;
}

// Simpson integral of an analytic tooth of unit height, independent of build_comb.
double analytic_tooth_area(PeakShape shape, double gamma)
{
    const double half = shape == PeakShape::lorentzian ? 2000.0 * gamma : 5.0 * gamma;
    const int n = 200000;
    const double h = 2 * half / n;
    auto f = [&](double x) {
        switch (shape) {
        case PeakShape::gaussian: return std::exp(-4 * std::log(2.0) * x * x / (gamma * gamma));
        case PeakShape::lorentzian: return 1.0 / (1 + 4 * x * x / (gamma * gamma));
        case PeakShape::square: return std::abs(x) <= gamma / 2 ? 1.0 : 0.0;
        }
        return 0.0;
    };
    double s = f(-half) + f(half);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-half + i * h);
    return s * h / 3;
}

}  // namespace

TEST(Comb, PaperCombHasNinePeaksSpacedByDelta)
{
    const auto spec = paper_comb();
    const auto p = build_comb(spec);
    const auto maxima = local_maxima(p);
    ASSERT_EQ(maxima.size(), 9u);
    for (std::size_t k = 1; k < maxima.size(); ++k) {
        EXPECT_NEAR(p.detunings_hz[maxima[k]] - p.detunings_hz[maxima[k - 1]], spec.delta_hz, p.grid_step_hz);
    }
    for (auto i : maxima) EXPECT_NEAR(p.optical_depth[i], spec.d_peak + spec.d_background, 0.01 * spec.d_peak);
}

TEST(Comb, GridResolvesEachToothWithEightSamples)
{
    const auto p = build_comb(paper_comb(), CombLimits{18e6, 8});
    EXPECT_LE(p.grid_step_hz, 100e3 / 8 * (1 + 1e-12));
    EXPECT_THROW(build_comb(paper_comb(), CombLimits{18e6, 4}), ValidationError);
}

TEST(Comb, SinglePeakHasNoPeriodicStructure)
{
    auto spec = paper_comb();
    spec.n_peaks = 1;
    const auto p = build_comb(spec);
    EXPECT_EQ(local_maxima(p).size(), 1u);
}

TEST(Comb, IntegralMatchesToothAreaForEveryShape)
{
    for (auto shape : {PeakShape::gaussian, PeakShape::lorentzian, PeakShape::square}) {
        auto spec = paper_comb();
        spec.peak_shape = shape;
        spec.d_background = 0.3;
        const auto p = build_comb(spec);
        const double numeric = std::accumulate(p.optical_depth.begin(), p.optical_depth.end(), 0.0) * p.grid_step_hz;
        const double area = analytic_tooth_area(shape, spec.gamma_hz);
        EXPECT_NEAR(area / spec.gamma_hz, tooth_area_factor(shape), 1e-3) << to_string(shape);
        double expected = spec.n_peaks * spec.d_peak * tooth_area_factor(shape) * spec.gamma_hz
                          + spec.d_background * spec.bandwidth_hz();
        if (shape == PeakShape::lorentzian) {
            // tails beyond the sampled span (3x bandwidth) are truncated by design
            double tail = 0.0;
            const double half = profile_half_span_hz(spec);
            for (int k = 0; k < spec.n_peaks; ++k) {
                const double c = spec.tooth_center_hz(k);
                const double g = spec.gamma_hz / 2;
                tail += spec.d_peak * g * (kPi - std::atan((half - c) / g) - std::atan((half + c) / g));
            }
            expected -= tail;
        }
        EXPECT_NEAR(numeric / expected, 1.0, 0.005) << to_string(shape);
    }
}

TEST(Comb, MinimaApproachBackgroundAtHighFinesse)
{
    auto spec = paper_comb();
    spec.gamma_hz = 50e3;  // F = 5
    spec.d_background = 0.1;
    const auto p = build_comb(spec);
    const double mid = 0.5 * (spec.tooth_center_hz(3) + spec.tooth_center_hz(4));
    EXPECT_NEAR(p.depth_at(mid), spec.d_background, 0.01);
}

TEST(Comb, RejectsInvalidSpecs)
{
    auto spec = paper_comb();
    spec.gamma_hz = 300e3;
    EXPECT_THROW(build_comb(spec), ValidationError);
    spec = paper_comb();
    spec.n_peaks = 80;  // 20 MHz
    EXPECT_THROW(build_comb(spec), ValidationError);
    spec = paper_comb();
    spec.d_peak = -1;
    EXPECT_THROW(build_comb(spec), ValidationError);
    spec = paper_comb();
    spec.n_peaks = 0;
    EXPECT_THROW(build_comb(spec), ValidationError);
}

TEST(Comb, DeterministicBitIdentical)
{
    const auto a = build_comb(paper_comb());
    const auto b = build_comb(paper_comb());
    EXPECT_EQ(a.optical_depth, b.optical_depth);
    EXPECT_EQ(a.detunings_hz, b.detunings_hz);
}

TEST(Comb, PeakCountPropertyOverSpecs)
{
    for (int n : {1, 2, 5, 9, 14}) {
        for (double f : {2.0, 3.0, 6.5}) {
            for (auto shape : {PeakShape::gaussian, PeakShape::lorentzian, PeakShape::square}) {
                CombSpec spec;
                spec.delta_hz = 200e3;
                spec.gamma_hz = 200e3 / f;
                spec.n_peaks = n;
                spec.d_peak = 2.0;
                spec.peak_shape = shape;
                const auto p = build_comb(spec);
                // square teeth are flat-topped; count plateaus by their rising edges
                std::size_t count = 0;
                if (shape == PeakShape::square) {
                    for (std::size_t i = 1; i < p.size(); ++i) {
                        if (p.optical_depth[i] > 0.5 * spec.d_peak && p.optical_depth[i - 1] <= 0.5 * spec.d_peak) ++count;
                    }
                } else {
                    count = local_maxima(p).size();
                }
                EXPECT_EQ(count, static_cast<std::size_t>(n)) << n << " " << f << " " << to_string(shape);
            }
        }
    }
}

TEST(Comb, IncreasingDepthNeverDecreasesProfile)
{
    auto lo = paper_comb();
    auto hi = lo;
    hi.d_peak = 5.0;
    const auto a = build_comb(lo), b = build_comb(hi);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_GE(b.optical_depth[i], a.optical_depth[i]);
}

TEST(Finesse, Values)
{
    EXPECT_DOUBLE_EQ(finesse(paper_comb()), 2.5);
    auto c = paper_comb();
    c.gamma_hz = c.delta_hz;
    EXPECT_DOUBLE_EQ(finesse(c), 1.0);
    c.delta_hz = 1e6;
    c.gamma_hz = 100e3;
    EXPECT_DOUBLE_EQ(finesse(c), 10.0);
}

TEST(EffectiveDepth, ScalesWithDepthAndInverseFinesse)
{
    auto c = paper_comb();
    EXPECT_DOUBLE_EQ(effective_depth(c), 1.6);
    c.d_peak = 8;
    EXPECT_DOUBLE_EQ(effective_depth(c), 3.2);
    c.gamma_hz = 25e3;
    EXPECT_DOUBLE_EQ(effective_depth(c), 0.8);
    c.gamma_hz = 1e-3;
    EXPECT_LT(effective_depth(c), 1e-7);
}

TEST(EffectiveDepth, SquareCombPeriodAverageDepth)
{
    // the period-averaged depth of square teeth is d/F; the period average of
    // the transmission e^{-d(x)} itself is larger (Jensen)
    auto c = paper_comb();
    c.peak_shape = PeakShape::square;
    const auto p = build_comb(c);
    double depth = 0.0, transmission = 0.0;
    int n = 0;
    const double lo = c.tooth_center_hz(4) - 0.5 * c.delta_hz;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = p.detunings_hz[i];
        if (x < lo || x >= lo + c.delta_hz) continue;
        depth += p.optical_depth[i];
        transmission += std::exp(-p.optical_depth[i]);
        ++n;
    }
    EXPECT_NEAR(depth / n, effective_depth(c), 0.02 * effective_depth(c));
    EXPECT_NEAR(std::exp(-depth / n), std::exp(-1.6), 0.02 * std::exp(-1.6));
    // two partially filled edge cells per period may each deviate by at most 1
    EXPECT_NEAR(transmission / n, 0.6 + 0.4 * std::exp(-4.0), 2.0 / n);
    EXPECT_GT(transmission / n, std::exp(-depth / n));
}

TEST(MultimodeCapacity, Examples)
{
    EXPECT_EQ(multimode_capacity(paper_comb(), 2e6), 9);
    auto one = paper_comb();
    one.n_peaks = 1;
    EXPECT_EQ(multimode_capacity(one, 100e3), 1);
    CombSpec fig5;
    fig5.delta_hz = 200e3;
    fig5.gamma_hz = 80e3;
    fig5.n_peaks = 10;
    EXPECT_EQ(multimode_capacity(fig5, 2e6), 10);
    EXPECT_EQ(multimode_capacity(fig5, 2e6, 0.5), 5);
    EXPECT_THROW(multimode_capacity(fig5, 3e6), ValidationError);
}

TEST(Profile, CsvExport)
{
    std::ostringstream os;
    write_csv(os, build_comb(paper_comb()));
    EXPECT_EQ(os.str().rfind("detuning_Hz,optical_depth\n", 0), 0u);
}

TEST(Profile, FlatAbsorber)
{
    const auto p = flat_profile(2.0, 2e6, 10e3);
    EXPECT_DOUBLE_EQ(p.depth_at(0.0), 2.0);
    EXPECT_DOUBLE_EQ(p.depth_at(5e6), 0.0);
    const double integral = std::accumulate(p.optical_depth.begin(), p.optical_depth.end(), 0.0) * p.grid_step_hz;
    EXPECT_NEAR(integral, 4e6, 1.0);
}
