// afcsim: scenario runner for the AFC memory simulator.
//
//   afcsim run <scenario>
//   afcsim sweep <scenario> --param <path> --values <v1,v2,...>
//   afcsim optimize <scenario>
//   afcsim validate <scenario>
//
// Exit codes: 0 success, 1 validation failure, 2 runtime or numerics failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "afc/runner.hpp"
#include "afc/scenario.hpp"

namespace {

struct CommonFlags {
    std::string scenario_file;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string resolution;
};

std::string read_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw afc::ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

afc::Scenario load(const CommonFlags& f)
{
    afc::Scenario sc = afc::parse_scenario(read_file(f.scenario_file));
    if (f.seed) sc.seed = *f.seed;
    if (!f.resolution.empty()) {
        const auto r = afc::parse_resolution(f.resolution);
        if (!r) throw afc::ValidationError("--resolution: '" + f.resolution + "' is not one of {fast, reference, converged}");
        sc.resolution = *r;
        afc::finalize(sc);
    }
    return sc;
}

std::filesystem::path output_dir(const CommonFlags& f, const afc::Scenario& sc)
{
    if (!f.out.empty()) return f.out;
    if (!sc.output_dir.empty()) return sc.output_dir;
    const char* env = std::getenv("AFCSIM_OUTPUT_DIR");
    const std::filesystem::path base = env != nullptr && *env != '\0' ? env : "afcsim-out";
    return base / sc.name;
}

int execute(const afc::Scenario& sc, const CommonFlags& f)
{
    const auto dir = output_dir(f, sc);
    const auto artifacts = afc::run_scenario(sc, dir);
    std::cout << "scenario " << sc.name << " (" << artifacts.summary["scenario_hash"].get<std::string>() << ")\n";
    if (artifacts.summary.contains("report")) {
        const auto& r = artifacts.summary["report"];
        std::cout << "  eta_total " << r["eta_total"] << "  eta_e " << r["eta_e"] << "  eta_T " << r["eta_T"]
                  << "  echo_time_s " << r["echo_time_s"] << '\n';
    }
    if (artifacts.summary.contains("optimization")) {
        const auto& o = artifacts.summary["optimization"];
        std::cout << "  best " << o["best"].dump() << "  objective " << o["best_objective"] << '\n';
    }
    if (artifacts.summary.contains("gaussian_fit")) {
        std::cout << "  fitted spin FWHM (Hz) " << artifacts.summary["gaussian_fit"]["spin_fwhm_hz"] << '\n';
    }
    std::cout << "  outputs in " << dir.string() << '\n';
    return 0;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool run_flags)
{
    cmd->add_option("scenario", f.scenario_file, "Scenario file (YAML)")->required();
    if (!run_flags) return;
    cmd->add_option("--out", f.out, "Output directory (default: run.output_dir, then $AFCSIM_OUTPUT_DIR/<name>)");
    cmd->add_option("--seed", f.seed, "Override run.seed");
    cmd->add_option("--resolution", f.resolution, "Grid preset: fast, reference or converged");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Atomic-frequency-comb memory simulator"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::string sweep_param;
    std::vector<double> sweep_values;

    auto* run = app.add_subcommand("run", "Run the scenario in its configured mode");
    add_common(run, flags, true);
    auto* sweep = app.add_subcommand("sweep", "Run the scenario over a list of values of one parameter");
    add_common(sweep, flags, true);
    sweep->add_option("--param", sweep_param, "Dotted parameter path, e.g. sequence.t_s_s")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
    auto* optimize = app.add_subcommand("optimize", "Run the scenario's optimize block");
    add_common(optimize, flags, true);
    auto* validate = app.add_subcommand("validate", "Parse and validate the scenario without running it");
    add_common(validate, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) {
            const auto sc = afc::parse_scenario(read_file(flags.scenario_file));
            std::cout << "ok: " << sc.name << " (" << afc::to_string(sc.mode) << ", hash " << afc::scenario_hash(sc)
                      << ")\n";
            return 0;
        }
        afc::Scenario sc = load(flags);
        if (sweep->parsed()) {
            afc::SweepSpec s;
            s.param = sweep_param;
            s.values = sweep_values;
            s.inner = sc.mode == afc::RunMode::sweep && sc.sweep ? sc.sweep->inner
                      : (sc.mode == afc::RunMode::sweep || sc.mode == afc::RunMode::optimize)
                          ? (sc.sequence.control ? afc::RunMode::spinwave : afc::RunMode::afc_echo)
                          : sc.mode;
            sc.sweep = s;
            sc.mode = afc::RunMode::sweep;
        } else if (optimize->parsed()) {
            if (!sc.optimize) throw afc::ValidationError("optimize: scenario has no optimize block");
            sc.mode = afc::RunMode::optimize;
        }
        return execute(sc, flags);
    } catch (const afc::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const YAML::Exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const afc::NumericsError& e) {
        std::cerr << "numerics error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
}
