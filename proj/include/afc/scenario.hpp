#pragma once

// Declarative scenario files (YAML). Every key is checked against the schema; errors
// carry the dotted field path and the source line/column.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "afc/collective.hpp"
#include "afc/common.hpp"
#include "afc/optimize.hpp"
#include "afc/protocol.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

enum class RunMode { afc_echo, spinwave, multimode, sweep, optimize };

inline std::optional<RunMode> parse_run_mode(std::string_view s)
{
    if (s == "afc_echo") return RunMode::afc_echo;
    if (s == "spinwave") return RunMode::spinwave;
    if (s == "multimode") return RunMode::multimode;
    if (s == "sweep") return RunMode::sweep;
    if (s == "optimize") return RunMode::optimize;
    return std::nullopt;
}

inline std::string_view to_string(RunMode m)
{
    switch (m) {
    case RunMode::afc_echo: return "afc_echo";
    case RunMode::spinwave: return "spinwave";
    case RunMode::multimode: return "multimode";
    case RunMode::sweep: return "sweep";
    case RunMode::optimize: return "optimize";
    }
    return "?";
}

enum class OptimizeTarget { control, comb };

struct SweepSpec {
    std::string param;  ///< dotted path into the scenario document
    std::vector<double> values;
    RunMode inner = RunMode::spinwave;
};

struct OptimizeSpec {
    OptimizeTarget target = OptimizeTarget::control;
    int budget = 150;
    double band_hz = 2e6;
    int n_samples = 41;
    double delta_hz = 0.0;  ///< comb target only; 0 means comb.delta_hz
    SearchSpace space;
};

struct GridOverrides {
    std::optional<int> n_slices;
    std::optional<double> dt_s;
    std::optional<int> samples_per_tooth;
    std::optional<int> spin_nodes;
};

struct Scenario {
    std::string name;
    StorageSequence sequence;
    RunMode mode = RunMode::afc_echo;
    Resolution resolution = Resolution::reference;
    GridOverrides grid_overrides;
    std::uint64_t seed = 1;
    std::string output_dir;
    bool convergence_check = false;
    int oracle_atoms = 10000;
    std::optional<SweepSpec> sweep;
    std::optional<OptimizeSpec> optimize;
    YAML::Node document;  ///< parsed source, used to derive sweep points
};

namespace detail {

inline std::string location(const YAML::Node& n)
{
    const auto m = n.Mark();
    if (m.is_null()) return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

class Block {
public:
    Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
    {
        if (!node_.IsMap()) throw ValidationError(where() + ": expected a mapping" + location(node_));
    }

    std::string where(const std::string& key = "") const
    {
        if (key.empty()) return path_.empty() ? "<document>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    YAML::Node at(const std::string& key) const
    {
        const YAML::Node& n = node_;
        return n[key];
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return static_cast<bool>(at(key));
    }

    template <class T>
    T get(const std::string& key, T fallback)
    {
        if (!has(key)) return fallback;
        return convert<T>(key);
    }

    template <class T>
    T need(const std::string& key)
    {
        if (!has(key)) {
            // a misspelt key is the usual cause; name it rather than the absence
            for (const auto& kv : node_) {
                const auto other = kv.first.as<std::string>();
                if (!seen_.count(other) && near_miss(other, key)) {
                    throw ValidationError("unknown key '" + where(other) + "'" + location(kv.first) + " (expected '"
                                          + where(key) + "')");
                }
            }
            throw ValidationError(where(key) + ": required field missing" + location(node_));
        }
        return convert<T>(key);
    }

    Block child(const std::string& key)
    {
        if (!has(key)) throw ValidationError(where(key) + ": required block missing" + location(node_));
        return Block(at(key), where(key));
    }

    std::optional<Block> optional_child(const std::string& key)
    {
        if (!has(key) || at(key).IsNull()) return std::nullopt;
        return Block(at(key), where(key));
    }

    YAML::Node raw(const std::string& key)
    {
        seen_.insert(key);
        return at(key);
    }

    /// Reject keys the schema did not consume.
    void finish() const
    {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ValidationError("unknown key '" + where(key) + "'" + location(kv.first));
            }
        }
    }

    void check(bool ok, const std::string& key, const std::string& invariant, const std::string& value)
    {
        if (!ok) {
            throw ValidationError(where(key) + ": invariant " + invariant + " violated (value " + value + ")"
                                  + location(at(key) ? at(key) : node_));
        }
    }

private:
    // edit distance at most 2
    static bool near_miss(const std::string& a, const std::string& b)
    {
        std::vector<std::size_t> row(b.size() + 1);
        for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1 : 0)});
                diag = up;
            }
        }
        return row[b.size()] <= 2;
    }

    template <class T>
    T convert(const std::string& key)
    {
        const YAML::Node v = at(key);
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            throw ValidationError(where(key) + ": cannot read value '" + (v.IsScalar() ? v.Scalar() : "<non-scalar>")
                                  + "'" + location(v));
        }
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::string str(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

template <class E, class Parse>
E enum_field(Block& b, const std::string& key, E fallback, Parse parse, const std::string& allowed)
{
    if (!b.has(key)) return fallback;
    const auto s = b.get<std::string>(key, "");
    const auto v = parse(s);
    if (!v) throw ValidationError(b.where(key) + ": '" + s + "' is not one of " + allowed);
    return *v;
}

inline Parameter parameter_field(Block& parent, const std::string& key, const Parameter& fallback)
{
    auto b = parent.optional_child(key);
    if (!b) return fallback;
    Parameter p;
    p.name = key;
    p.lower = b->need<double>("lower");
    p.upper = b->need<double>("upper");
    p.initial = b->get<double>("initial", p.lower);
    b->finish();
    b->check(p.lower <= p.upper, "upper", "lower <= upper", str(p.upper));
    b->check(p.initial >= p.lower && p.initial <= p.upper, "initial", "lower <= initial <= upper", str(p.initial));
    return p;
}

}  // namespace detail

inline Scenario parse_scenario_node(const YAML::Node& doc)
{
    if (!doc || doc.IsNull() || (doc.IsMap() && doc.size() == 0)) {
        throw ValidationError("empty scenario: required blocks material, comb, pulses, sequence, run are missing");
    }
    using detail::Block;
    using detail::str;
    Block root(doc, "");
    std::vector<std::string> missing;
    for (const char* k : {"material", "comb", "pulses", "sequence", "run"}) {
        if (!doc[k]) missing.emplace_back(k);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ValidationError("scenario: required blocks missing: " + list);
    }

    Scenario sc;
    sc.document = YAML::Clone(doc);
    sc.name = root.get<std::string>("name", "scenario");
    auto& seq = sc.sequence;

    {
        auto b = root.child("material");
        seq.homogeneous_linewidth_hz = b.get<double>("homogeneous_linewidth_hz", 1e3);
        seq.spin_fwhm_hz = b.get<double>("spin_fwhm_hz", 0.0);
        seq.spin_linewidth_hz = b.get<double>("spin_linewidth_hz", 0.0);
        seq.spin_shape = detail::enum_field(b, "spin_shape", SpinLineShape::gaussian, parse_spin_line_shape,
                                            "{gaussian, lorentzian}");
        seq.preparation_window_hz = b.get<double>("preparation_window_hz", kDefaultPreparationWindowHz);
        b.check(seq.homogeneous_linewidth_hz >= 0, "homogeneous_linewidth_hz", "homogeneous_linewidth >= 0",
                str(seq.homogeneous_linewidth_hz));
        b.check(seq.spin_fwhm_hz >= 0, "spin_fwhm_hz", "spin_fwhm >= 0", str(seq.spin_fwhm_hz));
        b.check(seq.spin_linewidth_hz >= 0, "spin_linewidth_hz", "spin_linewidth >= 0", str(seq.spin_linewidth_hz));
        b.check(seq.preparation_window_hz > 0, "preparation_window_hz", "preparation_window > 0",
                str(seq.preparation_window_hz));
        b.finish();
    }
    {
        auto b = root.child("comb");
        auto& c = seq.comb;
        c.delta_hz = b.need<double>("delta_hz");
        c.gamma_hz = b.need<double>("gamma_hz");
        c.d_peak = b.need<double>("d_peak");
        c.d_background = b.get<double>("d_background", 0.0);
        c.n_peaks = b.need<int>("n_peaks");
        c.peak_shape = detail::enum_field(b, "peak_shape", PeakShape::gaussian, parse_peak_shape,
                                          "{gaussian, lorentzian, square}");
        c.center_offset_hz = b.get<double>("center_offset_hz", 0.0);
        b.check(c.delta_hz > 0, "delta_hz", "delta > 0", str(c.delta_hz));
        b.check(c.gamma_hz > 0, "gamma_hz", "gamma > 0", str(c.gamma_hz));
        b.check(c.d_peak >= 0, "d_peak", "d_peak >= 0", str(c.d_peak));
        b.check(c.d_background >= 0, "d_background", "d_background >= 0", str(c.d_background));
        b.check(c.n_peaks >= 1, "n_peaks", "n_peaks >= 1", std::to_string(c.n_peaks));
        b.check(c.delta_hz >= c.gamma_hz, "gamma_hz", "finesse F = delta/gamma >= 1", str(c.delta_hz / c.gamma_hz));
        b.check(c.bandwidth_hz() <= seq.preparation_window_hz * (1 + 1e-12), "n_peaks",
                "n_peaks*delta <= preparation window", str(c.bandwidth_hz()));
        b.finish();
    }
    {
        auto b = root.child("pulses");
        {
            auto in = b.child("input");
            seq.input_fwhm_s = in.need<double>("fwhm_s");
            seq.input_peak_hz = in.get<double>("peak_rabi_hz", 1e3);
            seq.input_direction = detail::enum_field(in, "direction", Direction::forward, parse_direction,
                                                     "{forward, backward}");
            in.check(seq.input_fwhm_s > 0, "fwhm_s", "fwhm > 0", str(seq.input_fwhm_s));
            in.check(seq.input_peak_hz >= 0, "peak_rabi_hz", "peak_rabi >= 0", str(seq.input_peak_hz));
            in.finish();
        }
        if (auto cb = b.optional_child("control")) {
            ControlSpec c;
            c.kind = detail::enum_field(*cb, "kind", ControlKind::sech, parse_control_kind, "{sech, ideal, square}");
            c.duration_s = cb->get<double>("duration_s", c.duration_s);
            c.peak_rabi_hz = cb->get<double>("peak_rabi_hz", c.peak_rabi_hz);
            c.chirp_hz = cb->get<double>("chirp_hz", c.chirp_hz);
            c.convention = detail::enum_field(*cb, "duration_convention", DurationConvention::amplitude_fwhm,
                                              parse_duration_convention, "{amplitude_fwhm, time_constant}");
            c.direction = detail::enum_field(*cb, "direction", Direction::backward, parse_direction,
                                             "{forward, backward}");
            if (cb->has("profile")) seq.control_profile = cb->get<std::vector<double>>("profile", {});
            cb->check(c.duration_s > 0, "duration_s", "duration > 0", str(c.duration_s));
            cb->check(c.peak_rabi_hz >= 0, "peak_rabi_hz", "peak_rabi >= 0", str(c.peak_rabi_hz));
            cb->check(c.chirp_hz >= 0, "chirp_hz", "chirp >= 0", str(c.chirp_hz));
            cb->check(c.chirp_hz <= seq.preparation_window_hz, "chirp_hz", "chirp <= preparation window",
                      str(c.chirp_hz));
            cb->finish();
            seq.control = c;
        }
        b.finish();
    }
    {
        auto b = root.child("sequence");
        seq.t_prime_s = b.get<double>("t_prime_s", seq.t_prime_s);
        seq.t_s_s = b.get<double>("t_s_s", 0.0);
        seq.mode_times_s = b.get<std::vector<double>>("mode_times_s", {});
        if (b.has("readout_window_s")) {
            const auto w = b.get<std::vector<double>>("readout_window_s", {});
            b.check(w.size() == 2 && w[1] > w[0], "readout_window_s", "[start, end] with end > start",
                    std::to_string(w.size()) + " values");
            seq.readout_window = Window{w[0], w[1]};
        }
        b.check(seq.t_s_s >= 0, "t_s_s", "T_s >= 0", str(seq.t_s_s));
        b.check(seq.t_prime_s > 0, "t_prime_s", "T' > 0", str(seq.t_prime_s));
        if (seq.control) {
            const double dur = seq.control->kind == ControlKind::ideal ? 0.0 : seq.control->duration_s;
            b.check(seq.t_prime_s + dur < seq.comb.period_s(), "t_prime_s", "T' + control duration < 1/Delta",
                    str(seq.t_prime_s + dur));
        }
        b.finish();
    }
    {
        auto b = root.child("run");
        sc.mode = detail::enum_field(b, "mode", RunMode::afc_echo, parse_run_mode,
                                     "{afc_echo, spinwave, multimode, sweep, optimize}");
        sc.resolution = detail::enum_field(b, "resolution", Resolution::reference, parse_resolution,
                                           "{fast, reference, converged}");
        sc.seed = b.get<std::uint64_t>("seed", 1);
        sc.output_dir = b.get<std::string>("output_dir", "");
        sc.convergence_check = b.get<bool>("convergence_check", false);
        sc.oracle_atoms = b.get<int>("oracle_atoms", 10000);
        if (b.has("n_slices")) sc.grid_overrides.n_slices = b.get<int>("n_slices", 0);
        if (b.has("dt_s")) sc.grid_overrides.dt_s = b.get<double>("dt_s", 0.0);
        if (b.has("samples_per_tooth")) sc.grid_overrides.samples_per_tooth = b.get<int>("samples_per_tooth", 0);
        if (b.has("spin_nodes")) sc.grid_overrides.spin_nodes = b.get<int>("spin_nodes", 0);
        b.check(!sc.grid_overrides.n_slices || *sc.grid_overrides.n_slices >= 20, "n_slices", "n_slices >= 20",
                std::to_string(sc.grid_overrides.n_slices.value_or(0)));
        b.check(!sc.grid_overrides.dt_s || *sc.grid_overrides.dt_s > 0, "dt_s", "dt > 0",
                str(sc.grid_overrides.dt_s.value_or(0)));
        b.check(!sc.grid_overrides.samples_per_tooth || *sc.grid_overrides.samples_per_tooth >= 8,
                "samples_per_tooth", "samples_per_tooth >= 8",
                std::to_string(sc.grid_overrides.samples_per_tooth.value_or(0)));
        b.check(!sc.grid_overrides.spin_nodes || *sc.grid_overrides.spin_nodes >= 1, "spin_nodes", "spin_nodes >= 1",
                std::to_string(sc.grid_overrides.spin_nodes.value_or(0)));
        b.check(sc.oracle_atoms >= 1, "oracle_atoms", "oracle_atoms >= 1", std::to_string(sc.oracle_atoms));
        b.finish();
    }
    if (auto b = root.optional_child("sweep")) {
        SweepSpec s;
        s.param = b->need<std::string>("param");
        s.values = b->need<std::vector<double>>("values");
        s.inner = detail::enum_field(*b, "mode", seq.control ? RunMode::spinwave : RunMode::afc_echo, parse_run_mode,
                                     "{afc_echo, spinwave, multimode}");
        b->check(!s.values.empty(), "values", "at least one value", "[]");
        b->check(s.inner != RunMode::sweep && s.inner != RunMode::optimize, "mode", "inner mode is a single run",
                 std::string(to_string(s.inner)));
        b->finish();
        sc.sweep = s;
    }
    if (auto b = root.optional_child("optimize")) {
        OptimizeSpec o;
        const auto target = b->get<std::string>("target", "control");
        if (target == "control") {
            o.target = OptimizeTarget::control;
        } else if (target == "comb") {
            o.target = OptimizeTarget::comb;
        } else {
            throw ValidationError(b->where("target") + ": '" + target + "' is not one of {control, comb}");
        }
        o.budget = b->get<int>("budget", o.budget);
        o.band_hz = b->get<double>("band_hz", o.band_hz);
        o.n_samples = b->get<int>("n_samples", o.n_samples);
        o.delta_hz = b->get<double>("delta_hz", seq.comb.delta_hz);
        auto space = b->child("space");
        if (o.target == OptimizeTarget::control) {
            const ControlSpec c = seq.control.value_or(ControlSpec{});
            o.space = control_space(detail::parameter_field(space, "peak_rabi_hz", {"", c.peak_rabi_hz, c.peak_rabi_hz, c.peak_rabi_hz}),
                                    detail::parameter_field(space, "duration_s", {"", c.duration_s, c.duration_s, c.duration_s}),
                                    detail::parameter_field(space, "chirp_hz", {"", c.chirp_hz, c.chirp_hz, c.chirp_hz}));
            b->check(o.budget >= 50, "budget", "budget >= 50", std::to_string(o.budget));
            b->check(o.n_samples >= 11, "n_samples", "n_samples >= 11", std::to_string(o.n_samples));
        } else {
            const double f = seq.comb.delta_hz / seq.comb.gamma_hz;
            o.space = comb_space(detail::parameter_field(space, "d_peak", {"", seq.comb.d_peak, seq.comb.d_peak, seq.comb.d_peak}),
                                 detail::parameter_field(space, "finesse", {"", f, f, f}));
            b->check(o.budget >= 1, "budget", "budget >= 1", std::to_string(o.budget));
            b->check(o.space.parameters[1].lower >= 1, "space", "finesse lower >= 1", str(o.space.parameters[1].lower));
        }
        space.finish();
        b->finish();
        sc.optimize = o;
    }
    root.finish();

    if (sc.mode == RunMode::sweep && !sc.sweep) throw ValidationError("run.mode: sweep requires a sweep block");
    if (sc.mode == RunMode::optimize && !sc.optimize) throw ValidationError("run.mode: optimize requires an optimize block");
    if ((sc.mode == RunMode::spinwave || sc.mode == RunMode::multimode) && !seq.control) {
        throw ValidationError("pulses.control: required for run.mode " + std::string(to_string(sc.mode)));
    }
    if (sc.mode == RunMode::afc_echo && seq.control) {
        throw ValidationError("pulses.control: must be absent for run.mode afc_echo");
    }
    return sc;
}

/// Grid settings for a resolution preset with the scenario's explicit overrides applied.
inline GridSettings resolve_grid(const Scenario& sc, Resolution r)
{
    GridSettings g = grid_preset(r);
    if (sc.grid_overrides.n_slices) g.n_slices = *sc.grid_overrides.n_slices;
    if (sc.grid_overrides.dt_s) g.dt_s = *sc.grid_overrides.dt_s;
    if (sc.grid_overrides.samples_per_tooth) g.samples_per_tooth = *sc.grid_overrides.samples_per_tooth;
    if (sc.grid_overrides.spin_nodes) g.spin_nodes = *sc.grid_overrides.spin_nodes;
    return g;
}

inline void finalize(Scenario& sc)
{
    sc.sequence.grid = resolve_grid(sc, sc.resolution);
    if (sc.mode != RunMode::sweep && sc.mode != RunMode::optimize) {
        StorageSequence check = sc.sequence;
        if (sc.mode == RunMode::afc_echo) check.control.reset();
        validate(check);
    }
}

inline Scenario parse_scenario(const std::string& text)
{
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ValidationError("syntax error at line " + std::to_string(e.mark.line + 1) + ", column "
                              + std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    Scenario sc = parse_scenario_node(doc);
    finalize(sc);
    return sc;
}

/// Copy of the scenario document with one dotted path replaced.
inline YAML::Node with_value(const YAML::Node& doc, const std::string& path, double value)
{
    YAML::Node out = YAML::Clone(doc);
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    require(!parts.empty(), "sweep: empty parameter path");
    std::vector<YAML::Node> chain{out};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (!next || !next.IsMap()) throw ValidationError("sweep: parameter path '" + path + "' does not name a block");
        chain.push_back(next);
    }
    chain.back()[parts.back()] = value;
    return out;
}

// ---- serialization -------------------------------------------------------------------

/// Fully resolved scenario as a tree with the same schema as the input document.
inline nlohmann::ordered_json scenario_to_json(const Scenario& sc)
{
    using J = nlohmann::ordered_json;
    const auto& s = sc.sequence;
    J j;
    j["name"] = sc.name;
    j["material"] = {{"homogeneous_linewidth_hz", s.homogeneous_linewidth_hz},
                     {"spin_fwhm_hz", s.spin_fwhm_hz},
                     {"spin_linewidth_hz", s.spin_linewidth_hz},
                     {"spin_shape", to_string(s.spin_shape)},
                     {"preparation_window_hz", s.preparation_window_hz}};
    j["comb"] = {{"delta_hz", s.comb.delta_hz},         {"gamma_hz", s.comb.gamma_hz},
                 {"d_peak", s.comb.d_peak},             {"d_background", s.comb.d_background},
                 {"n_peaks", s.comb.n_peaks},           {"peak_shape", to_string(s.comb.peak_shape)},
                 {"center_offset_hz", s.comb.center_offset_hz}};
    J pulses;
    pulses["input"] = {{"fwhm_s", s.input_fwhm_s},
                       {"peak_rabi_hz", s.input_peak_hz},
                       {"direction", to_string(s.input_direction)}};
    if (s.control) {
        const auto& c = *s.control;
        pulses["control"] = {{"kind", to_string(c.kind)},
                             {"duration_s", c.duration_s},
                             {"peak_rabi_hz", c.peak_rabi_hz},
                             {"chirp_hz", c.chirp_hz},
                             {"duration_convention", to_string(c.convention)},
                             {"direction", to_string(c.direction)}};
        if (!s.control_profile.empty()) pulses["control"]["profile"] = s.control_profile;
    }
    j["pulses"] = pulses;
    J seq = {{"t_prime_s", s.t_prime_s}, {"t_s_s", s.t_s_s}, {"mode_times_s", s.modes()}};
    if (s.readout_window) seq["readout_window_s"] = {s.readout_window->first, s.readout_window->second};
    j["sequence"] = seq;
    j["run"] = {{"mode", to_string(sc.mode)},
                {"resolution", to_string(sc.resolution)},
                {"seed", sc.seed},
                {"output_dir", sc.output_dir},
                {"convergence_check", sc.convergence_check},
                {"oracle_atoms", sc.oracle_atoms},
                {"n_slices", s.grid.n_slices},
                {"dt_s", s.grid.dt_s},
                {"samples_per_tooth", s.grid.samples_per_tooth},
                {"spin_nodes", s.grid.spin_nodes}};
    if (sc.sweep) {
        j["sweep"] = {{"param", sc.sweep->param}, {"values", sc.sweep->values}, {"mode", to_string(sc.sweep->inner)}};
    }
    if (sc.optimize) {
        const auto& o = *sc.optimize;
        J space;
        for (const auto& p : o.space.parameters) {
            space[p.name] = {{"lower", p.lower}, {"upper", p.upper}, {"initial", p.initial}};
        }
        j["optimize"] = {{"target", o.target == OptimizeTarget::control ? "control" : "comb"},
                         {"budget", o.budget},
                         {"band_hz", o.band_hz},
                         {"n_samples", o.n_samples},
                         {"delta_hz", o.delta_hz},
                         {"space", space}};
    }
    return j;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string scenario_hash(const Scenario& sc)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(scenario_to_json(sc).dump());
    return os.str();
}

}  // namespace afc
