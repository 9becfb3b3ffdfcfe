#pragma once

// Executes a parsed scenario and writes its artifacts:
//   summary.json   deterministic record (resolved scenario, hash, results)
//   manifest.json  list of outputs plus wall-clock timing
//   *.csv          traces, sweep tables, convergence traces

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "afc/collective.hpp"
#include "afc/medium.hpp"
#include "afc/optimize.hpp"
#include "afc/protocol.hpp"
#include "afc/scenario.hpp"
#include "afc/spectral.hpp"

namespace afc {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json optional_number(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json report_json(const EfficiencyReport& r)
{
    ordered_json modes = ordered_json::array();
    for (const auto& m : r.modes) {
        modes.push_back({{"input_time_s", m.input_time_s},
                         {"output_time_s", m.output_time_s},
                         {"storage_time_s", m.storage_time_s},
                         {"efficiency", m.efficiency}});
    }
    return {{"eta_e", r.eta_e},
            {"eta_T", r.eta_T},
            {"dephasing", r.dephasing},
            {"eta_total", r.eta_total},
            {"eta_model", r.eta_model},
            {"model_discrepancy", r.model_discrepancy},
            {"echo_time_s", optional_number(r.echo_time_s)},
            {"echo_delay_s", optional_number(r.echo_delay_s)},
            {"transmitted_peak_s", optional_number(r.transmitted_peak_s)},
            {"transmitted", r.transmitted},
            {"modes", modes}};
}

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name)
    {
        std::ofstream os(dir_ / name);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
        files_.push_back(name);
        return os;
    }

    const std::vector<std::string>& files() const { return files_; }
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

/// Phasor-model echo time for the same comb and input (relative to the input centre).
inline std::optional<double> oracle_echo_time(const Scenario& sc)
{
    const auto& seq = sc.sequence;
    const auto profile = build_comb(seq.comb, CombLimits{seq.preparation_window_hz, seq.grid.samples_per_tooth});
    const auto input = make_input(seq, 0.0);
    SampleOptions so;
    so.spin_shape = seq.spin_shape;
    so.input = &input;
    auto sample = sample_atoms(profile, seq.control ? seq.spin_fwhm_hz : 0.0, static_cast<std::size_t>(sc.oracle_atoms),
                               sc.seed, so);
    const double period = seq.comb.period_s();
    double centre = period;
    if (seq.control && sc.mode != RunMode::afc_echo) {
        sample = spin_freeze_resume(std::move(sample), seq.t_prime_s, seq.t_s_s);
        centre += seq.t_s_s;
    }
    return echo_time(sample, {centre - 0.5 * period, centre + 0.5 * period});
}

struct SingleRun {
    RunOutput output;
    std::optional<double> t_double_prime_s;
};

inline SingleRun run_single(const StorageSequence& seq, RunMode mode)
{
    SingleRun r;
    switch (mode) {
    case RunMode::afc_echo: {
        StorageSequence s = seq;
        s.control.reset();
        r.output = run_afc_echo(s);
        break;
    }
    case RunMode::spinwave: r.output = run_spinwave_storage(seq); break;
    case RunMode::multimode: r.output = run_multimode(seq); break;
    default: throw ValidationError("run: mode is not a single simulation");
    }
    if (mode != RunMode::afc_echo && !r.output.report.modes.empty()) {
        r.t_double_prime_s = r.output.report.modes.front().output_time_s - seq.control2_time();
    }
    return r;
}

}  // namespace detail

struct RunArtifacts {
    ordered_json summary;
    ordered_json manifest;
};

/// Runs the scenario, writes artifacts into `out_dir`, and returns the records.
inline RunArtifacts run_scenario(const Scenario& sc, const std::filesystem::path& out_dir)
{
    const auto wall_start = std::chrono::steady_clock::now();
    detail::OutputDir out(out_dir);
    ordered_json summary;
    summary["scenario_hash"] = scenario_hash(sc);
    summary["scenario"] = scenario_to_json(sc);
    const auto& seq = sc.sequence;

    {
        auto os = out.open("comb.csv");
        write_csv(os, build_comb(seq.comb, CombLimits{seq.preparation_window_hz, seq.grid.samples_per_tooth}));
    }

    switch (sc.mode) {
    case RunMode::afc_echo:
    case RunMode::spinwave:
    case RunMode::multimode: {
        const auto run = detail::run_single(seq, sc.mode);
        {
            auto os = out.open("trace.csv");
            write_csv(os, run.output.record);
        }
        summary["report"] = detail::report_json(run.output.report);
        ordered_json timing = {{"t_prime_s", sc.mode == RunMode::afc_echo ? ordered_json(nullptr) : ordered_json(seq.t_prime_s)},
                               {"t_double_prime_s", detail::optional_number(run.t_double_prime_s)}};
        if (run.t_double_prime_s) timing["t_prime_plus_t_double_prime_s"] = seq.t_prime_s + *run.t_double_prime_s;
        summary["timing"] = timing;
        summary["oracle_echo_time_s"] = detail::optional_number(detail::oracle_echo_time(sc));
        if (sc.convergence_check) {
            StorageSequence fine = seq;
            fine.grid = refined(seq.grid);
            const auto check = detail::run_single(fine, sc.mode);
            const double a = run.output.report.eta_total, b = check.output.report.eta_total;
            const double rel = b != 0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b);
            summary["grid_convergence"] = {{"refined_eta_total", b}, {"relative_change", rel}};
            summary["grid_converged"] = rel < 0.01;
        } else {
            summary["grid_converged"] = nullptr;
        }
        break;
    }
    case RunMode::sweep: {
        const auto& sw = *sc.sweep;
        const auto leaf = sw.param.substr(sw.param.find_last_of('.') + 1);
        std::vector<Scenario> points;
        for (double v : sw.values) {
            Scenario p = parse_scenario_node(with_value(sc.document, sw.param, v));
            p.mode = sw.inner;
            p.resolution = sc.resolution;
            p.grid_overrides = sc.grid_overrides;
            finalize(p);
            points.push_back(std::move(p));
        }
        const auto runs = parallel_map<detail::SingleRun>(points.size(), [&](std::size_t i) {
            return detail::run_single(points[i].sequence, sw.inner);
        });
        ordered_json rows = ordered_json::array();
        auto table = out.open("sweep.csv");
        table.precision(17);
        table << leaf << ",eta_total\n";
        std::vector<double> ts, log_eta;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& rep = runs[i].output.report;
            table << sw.values[i] << ',' << rep.eta_total << '\n';
            auto os = out.open("trace_" + std::to_string(i) + ".csv");
            write_csv(os, runs[i].output.record);
            ordered_json row = {{"value", sw.values[i]}, {"report", detail::report_json(rep)}};
            row["t_double_prime_s"] = detail::optional_number(runs[i].t_double_prime_s);
            if (runs[i].t_double_prime_s) {
                row["t_prime_plus_t_double_prime_s"] = points[i].sequence.t_prime_s + *runs[i].t_double_prime_s;
            }
            rows.push_back(row);
            if (rep.eta_total > 0) {
                ts.push_back(points[i].sequence.t_s_s);
                log_eta.push_back(std::log(rep.eta_total));
            }
        }
        summary["sweep"] = {{"param", sw.param}, {"points", rows}};
        if (sw.param == "sequence.t_s_s" && ts.size() >= 3) {
            // ln(eta) = a - b T_s^2
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = static_cast<double>(ts.size());
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double x = ts[i] * ts[i];
                sx += x;
                sy += log_eta[i];
                sxx += x * x;
                sxy += x * log_eta[i];
            }
            const double b = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
            summary["gaussian_fit"] = {{"slope_per_s2", b},
                                       {"spin_fwhm_hz", b >= 0 ? ordered_json(spin_fwhm_from_gaussian_slope(b)) : ordered_json(nullptr)}};
        }
        summary["grid_converged"] = nullptr;
        break;
    }
    case RunMode::optimize: {
        const auto& o = *sc.optimize;
        OptimizerOptions opts;
        opts.seed = sc.seed;
        std::vector<double> trace;
        if (o.target == OptimizeTarget::control) {
            ControlObjective obj;
            obj.n_samples = o.n_samples;
            obj.preparation_window_hz = seq.preparation_window_hz;
            if (seq.control) obj.convention = seq.control->convention;
            const auto res = optimize_control(o.space, o.band_hz, o.budget, opts, obj);
            ordered_json best;
            for (std::size_t i = 0; i < res.names.size(); ++i) best[res.names[i]] = res.best[i];
            summary["optimization"] = {{"target", "control"},
                                       {"best", best},
                                       {"best_objective", res.best_objective},
                                       {"initial_objective", res.initial_objective},
                                       {"evaluations", res.evaluations}};
            trace = res.trace;
        } else {
            CombObjective obj;
            obj.search_grid = grid_preset(Resolution::fast);
            obj.search_grid.spin_nodes = 1;
            obj.final_grid = seq.grid;
            const auto res = optimize_comb(o.space, o.delta_hz, seq, o.budget, opts, obj);
            ordered_json best;
            for (std::size_t i = 0; i < res.search.names.size(); ++i) best[res.search.names[i]] = res.search.best[i];
            ordered_json curve = ordered_json::array();
            auto os = out.open("tradeoff.csv");
            os.precision(17);
            os << "finesse,eta_e\n";
            for (const auto& p : res.tradeoff) {
                curve.push_back({{"finesse", p.finesse}, {"eta_e", p.eta_e}});
                os << p.finesse << ',' << p.eta_e << '\n';
            }
            summary["optimization"] = {{"target", "comb"},
                                       {"best", best},
                                       {"best_objective", res.search.best_objective},
                                       {"final_eta_e", res.final_eta_e},
                                       {"initial_objective", res.search.initial_objective},
                                       {"evaluations", res.search.evaluations},
                                       {"tradeoff", curve}};
            trace = res.search.trace;
        }
        auto os = out.open("convergence.csv");
        os.precision(17);
        os << "evaluation,best_objective\n";
        for (std::size_t i = 0; i < trace.size(); ++i) os << i + 1 << ',' << trace[i] << '\n';
        summary["grid_converged"] = nullptr;
        break;
    }
    }

    {
        auto os = out.open("summary.json");
        os << summary.dump(2) << '\n';
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    ordered_json manifest = {{"scenario_hash", summary["scenario_hash"]},
                             {"output_dir", out.path().string()},
                             {"files", out.files()},
                             {"wall_clock_s", wall}};
    manifest["files"].push_back("manifest.json");
    {
        std::ofstream os(out.path() / "manifest.json");
        if (!os) throw std::runtime_error("cannot write manifest.json");
        os << manifest.dump(2) << '\n';
    }
    return {summary, manifest};
}

}  // namespace afc
