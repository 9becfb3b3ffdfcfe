#pragma once

// Bounded derivative-free maximization (Nelder-Mead on the unit box with seeded
// restarts) and its two uses: control-pulse tuning and comb tuning.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afc/atoms.hpp"
#include "afc/common.hpp"
#include "afc/protocol.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

struct Parameter {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double initial = 0.0;
};

struct SearchSpace {
    std::vector<Parameter> parameters;

    std::size_t size() const { return parameters.size(); }

    const Parameter& at(const std::string& name) const
    {
        for (const auto& p : parameters) {
            if (p.name == name) return p;
        }
        throw ValidationError("search space: no parameter named '" + name + "'");
    }

    std::vector<double> initial() const
    {
        std::vector<double> x;
        for (const auto& p : parameters) x.push_back(p.initial);
        return x;
    }
};

inline void validate(const SearchSpace& space)
{
    require(!space.parameters.empty(), "search space: at least one parameter required");
    for (const auto& p : space.parameters) {
        const std::string where = "search space '" + p.name + "': ";
        require(std::isfinite(p.lower) && std::isfinite(p.upper), where + "bounds must be finite");
        require(p.lower <= p.upper, where + "lower <= upper violated");
        require(p.initial >= p.lower && p.initial <= p.upper, where + "initial value outside bounds");
    }
}

struct OptimizationResult {
    std::vector<std::string> names;
    std::vector<double> best;
    double best_objective = -std::numeric_limits<double>::infinity();
    double initial_objective = -std::numeric_limits<double>::infinity();
    int evaluations = 0;
    std::vector<double> trace;  ///< best-so-far after each evaluation

    double value(const std::string& name) const
    {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return best[i];
        }
        throw ValidationError("optimization result: no parameter named '" + name + "'");
    }
};

struct OptimizerOptions {
    int budget = 200;
    std::uint64_t seed = 1;
    double initial_step = 0.25;  ///< simplex edge as a fraction of each range
    double tolerance = 1e-4;     ///< restart when the simplex shrinks below this (unit box)
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Maximize `objective` over the box. Deterministic for a given seed and budget; the
/// budget counts objective evaluations.
inline OptimizationResult maximize(const SearchSpace& space, const Objective& objective, const OptimizerOptions& options = {})
{
    validate(space);
    require(options.budget >= 1, "optimizer: budget >= 1 violated");
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (space.parameters[i].upper > space.parameters[i].lower) free.push_back(i);
    }
    const std::size_t n = free.size();

    auto to_params = [&](const std::vector<double>& u) {
        std::vector<double> x = space.initial();
        for (std::size_t k = 0; k < n; ++k) {
            const auto& p = space.parameters[free[k]];
            x[free[k]] = p.lower + std::clamp(u[k], 0.0, 1.0) * (p.upper - p.lower);
        }
        return x;
    };

    OptimizationResult res;
    for (const auto& p : space.parameters) res.names.push_back(p.name);
    std::vector<double> best_u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = space.parameters[free[k]];
        best_u[k] = (p.initial - p.lower) / (p.upper - p.lower);
    }

    auto record = [&](const std::vector<double>& u, double f) {
        ++res.evaluations;
        if (!std::isfinite(f)) f = -std::numeric_limits<double>::infinity();
        if (f > res.best_objective) {
            res.best_objective = f;
            best_u = u;
        }
        res.trace.push_back(res.best_objective);
        return f;
    };
    auto budget_left = [&] { return options.budget - res.evaluations; };
    auto clamp_unit = [](std::vector<double> u) {
        for (double& v : u) v = std::clamp(v, 0.0, 1.0);
        return u;
    };

    res.initial_objective = record(best_u, objective(to_params(best_u)));
    if (n == 0) {
        res.best = to_params(best_u);
        return res;
    }

    Rng rng(options.seed);
    double step = options.initial_step;
    bool first_round = true;
    while (budget_left() > static_cast<int>(n)) {
        // simplex around the incumbent: axis steps on the first round, random signs after
        std::vector<std::vector<double>> simplex{best_u};
        for (std::size_t k = 0; k < n; ++k) {
            auto v = best_u;
            double s = step;
            if (!first_round) s *= rng.uniform() < 0.5 ? -1.0 : 1.0;
            if (v[k] + s > 1.0 || v[k] + s < 0.0) s = -s;
            v[k] = std::clamp(v[k] + s, 0.0, 1.0);
            simplex.push_back(v);
        }
        std::vector<double> f(simplex.size());
        f[0] = res.best_objective;
        {
            const std::size_t m = std::min<std::size_t>(n, static_cast<std::size_t>(budget_left()));
            const auto values = parallel_map<double>(m, [&](std::size_t k) { return objective(to_params(simplex[k + 1])); });
            for (std::size_t k = 0; k < m; ++k) f[k + 1] = record(simplex[k + 1], values[k]);
            if (m < n) break;
        }

        auto evaluate = [&](const std::vector<double>& u) { return record(u, objective(to_params(u))); };
        while (budget_left() > 0) {
            std::vector<std::size_t> order(simplex.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
            const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
            double size = 0.0;
            for (std::size_t k = 0; k < simplex.size(); ++k) {
                for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::abs(simplex[k][d] - simplex[best][d]));
            }
            if (size < options.tolerance) break;

            std::vector<double> centroid(n, 0.0);
            for (std::size_t k = 0; k < simplex.size(); ++k) {
                if (k == worst) continue;
                for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[k][d] / static_cast<double>(n);
            }
            auto along = [&](double t) {
                std::vector<double> u(n);
                for (std::size_t d = 0; d < n; ++d) u[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
                return clamp_unit(u);
            };
            const auto xr = along(-1.0);
            const double fr = evaluate(xr);
            if (fr > f[best] && budget_left() > 0) {
                const auto xe = along(-2.0);
                const double fe = evaluate(xe);
                if (fe > fr) {
                    simplex[worst] = xe;
                    f[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    f[worst] = fr;
                }
                continue;
            }
            if (fr > f[second]) {
                simplex[worst] = xr;
                f[worst] = fr;
                continue;
            }
            if (budget_left() == 0) break;
            const auto xc = fr > f[worst] ? along(-0.5) : along(0.5);
            const double fc = evaluate(xc);
            if (fc > std::max(fr, f[worst])) {
                simplex[worst] = xc;
                f[worst] = fc;
                continue;
            }
            // shrink towards the best vertex
            std::vector<std::size_t> others;
            for (std::size_t k = 0; k < simplex.size(); ++k) {
                if (k == best) continue;
                for (std::size_t d = 0; d < n; ++d) simplex[k][d] = simplex[best][d] + 0.5 * (simplex[k][d] - simplex[best][d]);
                others.push_back(k);
            }
            const std::size_t m = std::min<std::size_t>(others.size(), static_cast<std::size_t>(budget_left()));
            const auto values = parallel_map<double>(m, [&](std::size_t i) { return objective(to_params(simplex[others[i]])); });
            for (std::size_t i = 0; i < m; ++i) f[others[i]] = record(simplex[others[i]], values[i]);
            for (std::size_t i = m; i < others.size(); ++i) f[others[i]] = -std::numeric_limits<double>::infinity();
        }
        first_round = false;
        step = std::max(0.5 * step, 4.0 * options.tolerance);
    }
    res.best = to_params(best_u);
    return res;
}

// ---- control pulses ----------------------------------------------------------------

struct ControlObjective {
    DurationConvention convention = DurationConvention::amplitude_fwhm;
    int n_samples = 41;
    Decay decay = Decay::none();
    double preparation_window_hz = kDefaultPreparationWindowHz;
};

/// Search space over {peak_rabi_hz, duration_s, chirp_hz}.
inline SearchSpace control_space(Parameter rabi, Parameter duration, Parameter chirp)
{
    rabi.name = "peak_rabi_hz";
    duration.name = "duration_s";
    chirp.name = "chirp_hz";
    return {{rabi, duration, chirp}};
}

inline double control_transfer(double rabi, double duration, double chirp, double band_hz, const ControlObjective& obj)
{
    SechOptions so;
    so.convention = obj.convention;
    so.preparation_window_hz = obj.preparation_window_hz;
    const auto pulse = sech_pulse(duration, rabi, chirp, 0.0, Transition::s_e, Direction::backward, so);
    return band_averaged_transfer(pulse, band_hz, obj.n_samples, TransferOptions{obj.decay});
}

inline OptimizationResult optimize_control(const SearchSpace& space, double band_hz, int budget,
                                           const OptimizerOptions& options = {}, const ControlObjective& obj = {})
{
    require(budget >= 50, "optimize_control: budget >= 50 violated");
    require(band_hz >= 0, "optimize_control: band >= 0 violated");
    validate(space);
    const auto& names = space.parameters;
    require(names.size() == 3 && names[0].name == "peak_rabi_hz" && names[1].name == "duration_s"
                && names[2].name == "chirp_hz",
            "optimize_control: space must be {peak_rabi_hz, duration_s, chirp_hz}");
    require(names[1].lower > 0, "optimize_control: duration lower bound must be positive");
    OptimizerOptions o = options;
    o.budget = budget;
    return maximize(
        space, [&](const std::vector<double>& x) { return control_transfer(x[0], x[1], x[2], band_hz, obj); }, o);
}

// ---- comb ----------------------------------------------------------------------------

struct CombTradeoffPoint {
    double finesse = 0.0;
    double eta_e = 0.0;
};

struct CombOptimization {
    OptimizationResult search;  ///< at the search resolution
    double final_eta_e = 0.0;   ///< best point re-evaluated at the final resolution
    std::vector<CombTradeoffPoint> tradeoff;  ///< eta_e vs F at the best d_peak
};

struct CombObjective {
    GridSettings search_grid = grid_preset(Resolution::fast);
    GridSettings final_grid = grid_preset(Resolution::reference);
    int tradeoff_points = 10;
};

/// Search space over {d_peak, finesse}.
inline SearchSpace comb_space(Parameter d_peak, Parameter finesse_bounds)
{
    d_peak.name = "d_peak";
    finesse_bounds.name = "finesse";
    return {{d_peak, finesse_bounds}};
}

inline double comb_echo_efficiency(const StorageSequence& base, double delta_hz, double d_peak, double finesse_value,
                                   const GridSettings& grid)
{
    StorageSequence s = base;
    s.control.reset();
    s.comb.delta_hz = delta_hz;
    s.comb.gamma_hz = delta_hz / finesse_value;
    s.comb.d_peak = d_peak;
    s.grid = grid;
    return run_afc_echo(s).report.eta_e;
}

/// Maximize eta_e over (d_peak, F) at fixed tooth spacing. `base` supplies the input
/// pulse, tooth count and shape, and material parameters.
inline CombOptimization optimize_comb(const SearchSpace& space, double delta_hz, const StorageSequence& base,
                                      int budget, const OptimizerOptions& options = {}, const CombObjective& obj = {})
{
    validate(space);
    require(budget >= 1, "optimize_comb: budget >= 1 violated");
    require(delta_hz > 0, "optimize_comb: delta > 0 violated");
    const auto& ps = space.parameters;
    require(ps.size() == 2 && ps[0].name == "d_peak" && ps[1].name == "finesse",
            "optimize_comb: space must be {d_peak, finesse}");
    require(ps[1].lower >= 1.0, "optimize_comb: finesse lower bound >= 1 violated");
    OptimizerOptions o = options;
    o.budget = budget;
    CombOptimization out;
    out.search = maximize(
        space,
        [&](const std::vector<double>& x) { return comb_echo_efficiency(base, delta_hz, x[0], x[1], obj.search_grid); },
        o);
    const double d = out.search.best[0];
    out.final_eta_e = comb_echo_efficiency(base, delta_hz, d, out.search.best[1], obj.final_grid);
    const int m = std::max(2, obj.tradeoff_points);
    const double f_lo = ps[1].lower, f_hi = ps[1].upper;
    if (f_hi > f_lo) {
        out.tradeoff = parallel_map<CombTradeoffPoint>(static_cast<std::size_t>(m), [&](std::size_t i) {
            const double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) / (m - 1);
            return CombTradeoffPoint{f, comb_echo_efficiency(base, delta_hz, d, f, obj.search_grid)};
        });
    }
    return out;
}

}  // namespace afc
