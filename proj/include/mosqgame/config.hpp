#ifndef MOSQGAME_CONFIG_HPP
#define MOSQGAME_CONFIG_HPP

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "analysis.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "params.hpp"
#include "sweep.hpp"

namespace mosqgame {

struct SweepSettings {
    bool enabled = false;
    SweepMode mode = SweepMode::Regions;
    SweepAxis axis1{"N", 0.5, 2.0, 8, false};
    SweepAxis axis2{"rc_over_rd", 1e3, 1e5, 8, true};
    double max_horizon_factor = 16.0;
    unsigned threads = 0;
};

struct OutputSettings {
    std::string dir;            ///< empty: $MOSQGAME_OUT_DIR, else the working directory
    std::string prefix = "run"; ///< file name stem
    double stride = 0.0;        ///< time-series spacing in days; 0 writes solver step points
};

/// Everything one CLI run needs, as read from an INI document.
struct RunConfig {
    ModelVariant variant = ModelVariant::ConstantPayoff;
    EntomologicalParams ento;
    BehaviorParams behavior;
    HabitatParams habitat;
    State initial{2e4, 2e4, 0.5};
    double t0 = 0.0;
    double t1 = 100.0;
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    SweepSettings sweep;
    OutputSettings output;

    /// Validated model parameters; throws InvalidParameter.
    [[nodiscard]] ModelParams model_params() const { return {variant, ento, behavior, habitat}; }

    [[nodiscard]] SweepSpec sweep_spec() const {
        SweepSpec s;
        s.axis1 = sweep.axis1;
        s.axis2 = sweep.axis2;
        s.base = model_params();
        s.s0 = initial;
        s.t0 = t0;
        s.t1 = t1;
        s.max_horizon_factor = sweep.max_horizon_factor;
        s.integrator = integrator;
        s.analysis = analysis;
        s.mode = sweep.mode;
        s.threads = sweep.threads;
        return s;
    }
};

// ---------------------------------------------------------------- scalars

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isnan(d))
        throw ConfigError(key + ": '" + v + "' is not a number");
    return d;
}

inline unsigned long long parse_count(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + v + "' is out of range");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

/// One INI entry with its reader and writer.
struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;

    [[nodiscard]] std::string path() const { return section + "." + key; }
};

template <class Ref>
Field num_field(std::string sec, std::string key, Ref ref) {
    const std::string path = sec + "." + key;
    return Field{std::move(sec), std::move(key),
                 [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
                 [ref, path](RunConfig& c, const std::string& v) { ref(c) = parse_double(path, v); }};
}

inline std::string axis_scale(const SweepAxis& a) { return a.log ? "log" : "linear"; }

inline bool parse_axis_scale(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s == "log") return true;
    if (s == "linear") return false;
    throw ConfigError(key + ": expected linear or log, got '" + v + "'");
}

inline std::vector<Field> axis_fields(const std::string& name, SweepAxis SweepSettings::*axis) {
    std::vector<Field> f;
    const std::string sec = "sweep";
    f.push_back({sec, name, [axis](const RunConfig& c) { return (c.sweep.*axis).name; },
                 [axis, name](RunConfig& c, const std::string& v) {
                     const auto s = trim(v);
                     if (!is_known_axis(s)) throw ConfigError("sweep." + name + ": unknown axis '" + s + "'");
                     (c.sweep.*axis).name = s;
                 }});
    f.push_back(num_field(sec, name + "_min", [axis](RunConfig& c) -> double& { return (c.sweep.*axis).min; }));
    f.push_back(num_field(sec, name + "_max", [axis](RunConfig& c) -> double& { return (c.sweep.*axis).max; }));
    f.push_back({sec, name + "_count", [axis](const RunConfig& c) { return std::to_string((c.sweep.*axis).count); },
                 [axis, name](RunConfig& c, const std::string& v) {
                     (c.sweep.*axis).count = parse_count("sweep." + name + "_count", v);
                 }});
    f.push_back({sec, name + "_scale", [axis](const RunConfig& c) { return axis_scale(c.sweep.*axis); },
                 [axis, name](RunConfig& c, const std::string& v) {
                     (c.sweep.*axis).log = parse_axis_scale("sweep." + name + "_scale", v);
                 }});
    return f;
}

inline std::string mode_name(SweepMode m) { return m == SweepMode::Regions ? "regions" : "oscillations"; }

/// The INI schema, in serialization order.
inline const std::vector<Field>& schema() {
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        f.push_back({"model", "variant", [](const RunConfig& c) { return std::string(to_string(c.variant)); },
                     [](RunConfig& c, const std::string& v) {
                         try {
                             c.variant = variant_from_string(trim(v));
                         } catch (const InvalidParameter& e) {
                             throw ConfigError(std::string("model.variant: ") + e.what());
                         }
                     }});
        f.push_back(num_field("entomology", "r", [](RunConfig& c) -> double& { return c.ento.r; }));
        f.push_back(num_field("entomology", "b", [](RunConfig& c) -> double& { return c.ento.b; }));
        f.push_back(num_field("entomology", "nu_L", [](RunConfig& c) -> double& { return c.ento.nu_L; }));
        f.push_back(num_field("entomology", "mu_L", [](RunConfig& c) -> double& { return c.ento.mu_L; }));
        f.push_back(num_field("entomology", "mu_A", [](RunConfig& c) -> double& { return c.ento.mu_A; }));
        f.push_back(num_field("behavior", "k", [](RunConfig& c) -> double& { return c.behavior.k; }));
        f.push_back(num_field("behavior", "r_c", [](RunConfig& c) -> double& { return c.behavior.r_c; }));
        f.push_back(num_field("behavior", "r_d", [](RunConfig& c) -> double& { return c.behavior.r_d; }));
        f.push_back(num_field("behavior", "m", [](RunConfig& c) -> double& { return c.behavior.m; }));
        f.push_back(num_field("behavior", "gamma", [](RunConfig& c) -> double& { return c.behavior.gamma; }));
        f.push_back(num_field("habitat", "K_max", [](RunConfig& c) -> double& { return c.habitat.K_max; }));
        f.push_back(num_field("habitat", "K_min", [](RunConfig& c) -> double& { return c.habitat.K_min; }));
        f.push_back(num_field("initial", "L_v", [](RunConfig& c) -> double& { return c.initial.L_v; }));
        f.push_back(num_field("initial", "A_v", [](RunConfig& c) -> double& { return c.initial.A_v; }));
        f.push_back(num_field("initial", "w", [](RunConfig& c) -> double& { return c.initial.w; }));
        f.push_back(num_field("time", "t0", [](RunConfig& c) -> double& { return c.t0; }));
        f.push_back(num_field("time", "t1", [](RunConfig& c) -> double& { return c.t1; }));

        f.push_back(num_field("integrator", "rel_tol", [](RunConfig& c) -> double& { return c.integrator.rel_tol; }));
        for (int i = 0; i < 3; ++i) {
            static const char* names[] = {"abs_tol_L_v", "abs_tol_A_v", "abs_tol_w"};
            const std::string key = names[i];
            f.push_back({"integrator", key,
                         [i](const RunConfig& c) {
                             return format_double(c.integrator.resolved_abs_tol(c.habitat.K_max)[i]);
                         },
                         [i, key](RunConfig& c, const std::string& v) {
                             if (!c.integrator.abs_tol)
                                 c.integrator.abs_tol = c.integrator.resolved_abs_tol(c.habitat.K_max);
                             (*c.integrator.abs_tol)[i] = parse_double("integrator." + key, v);
                         }});
        }
        f.push_back(num_field("integrator", "max_step", [](RunConfig& c) -> double& { return c.integrator.max_step; }));
        f.push_back({"integrator", "initial_step",
                     [](const RunConfig& c) {
                         return c.integrator.initial_step ? format_double(*c.integrator.initial_step)
                                                          : std::string("auto");
                     },
                     [](RunConfig& c, const std::string& v) {
                         if (trim(v) == "auto") c.integrator.initial_step.reset();
                         else c.integrator.initial_step = parse_double("integrator.initial_step", v);
                     }});
        f.push_back({"integrator", "max_steps", [](const RunConfig& c) { return std::to_string(c.integrator.max_steps); },
                     [](RunConfig& c, const std::string& v) {
                         c.integrator.max_steps = parse_count("integrator.max_steps", v);
                     }});

        f.push_back(num_field("analysis", "conv_tol", [](RunConfig& c) -> double& { return c.analysis.conv_tol; }));
        f.push_back(num_field("analysis", "tail_fraction", [](RunConfig& c) -> double& { return c.analysis.tail_fraction; }));
        f.push_back(num_field("analysis", "transient_fraction",
                              [](RunConfig& c) -> double& { return c.analysis.transient_fraction; }));
        f.push_back(num_field("analysis", "population_floor",
                              [](RunConfig& c) -> double& { return c.analysis.population_floor; }));
        f.push_back(num_field("analysis", "amp_floor_population",
                              [](RunConfig& c) -> double& { return c.analysis.amp_floor_population; }));
        f.push_back(num_field("analysis", "amp_floor_w", [](RunConfig& c) -> double& { return c.analysis.amp_floor_w; }));
        f.push_back({"analysis", "min_peaks", [](const RunConfig& c) { return std::to_string(c.analysis.min_peaks); },
                     [](RunConfig& c, const std::string& v) {
                         c.analysis.min_peaks = parse_count("analysis.min_peaks", v);
                     }});
        f.push_back(num_field("analysis", "max_jitter", [](RunConfig& c) -> double& { return c.analysis.max_jitter; }));
        f.push_back(num_field("analysis", "spectral_tolerance",
                              [](RunConfig& c) -> double& { return c.analysis.spectral_tolerance; }));
        f.push_back(num_field("analysis", "min_amplitude_ratio",
                              [](RunConfig& c) -> double& { return c.analysis.min_amplitude_ratio; }));
        f.push_back(num_field("analysis", "sample_stride", [](RunConfig& c) -> double& { return c.analysis.sample_stride; }));

        f.push_back({"sweep", "enabled", [](const RunConfig& c) { return std::string(c.sweep.enabled ? "true" : "false"); },
                     [](RunConfig& c, const std::string& v) { c.sweep.enabled = parse_bool("sweep.enabled", v); }});
        f.push_back({"sweep", "mode", [](const RunConfig& c) { return mode_name(c.sweep.mode); },
                     [](RunConfig& c, const std::string& v) {
                         const auto s = trim(v);
                         if (s == "regions") c.sweep.mode = SweepMode::Regions;
                         else if (s == "oscillations") c.sweep.mode = SweepMode::Oscillations;
                         else throw ConfigError("sweep.mode: expected regions or oscillations, got '" + v + "'");
                     }});
        for (auto& x : axis_fields("axis1", &SweepSettings::axis1)) f.push_back(std::move(x));
        for (auto& x : axis_fields("axis2", &SweepSettings::axis2)) f.push_back(std::move(x));
        f.push_back(num_field("sweep", "max_horizon_factor",
                              [](RunConfig& c) -> double& { return c.sweep.max_horizon_factor; }));
        f.push_back({"sweep", "threads", [](const RunConfig& c) { return std::to_string(c.sweep.threads); },
                     [](RunConfig& c, const std::string& v) {
                         c.sweep.threads = static_cast<unsigned>(parse_count("sweep.threads", v));
                     }});

        f.push_back({"output", "dir", [](const RunConfig& c) { return c.output.dir; },
                     [](RunConfig& c, const std::string& v) { c.output.dir = trim(v); }});
        f.push_back({"output", "prefix", [](const RunConfig& c) { return c.output.prefix; },
                     [](RunConfig& c, const std::string& v) {
                         const auto s = trim(v);
                         if (s.empty() || s.find_first_of("/\\") != std::string::npos)
                             throw ConfigError("output.prefix must be a plain, non-empty file stem");
                         c.output.prefix = s;
                     }});
        f.push_back(num_field("output", "stride", [](RunConfig& c) -> double& { return c.output.stride; }));
        return f;
    }();
    return fields;
}

inline const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : schema())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

} // namespace detail

/// Checks cross-field constraints that the per-key parsers cannot see.
inline void validate(const RunConfig& c) {
    try {
        (void)c.model_params();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    if (!(std::isfinite(c.t0) && std::isfinite(c.t1) && c.t1 > c.t0)) throw ConfigError("time: t1 must exceed t0");
    if (!(c.integrator.rel_tol > 0.0)) throw ConfigError("integrator.rel_tol must be > 0");
    for (double a : c.integrator.resolved_abs_tol(c.habitat.K_max))
        if (!(a > 0.0)) throw ConfigError("integrator absolute tolerances must be > 0");
    if (!(c.integrator.max_step > 0.0)) throw ConfigError("integrator.max_step must be > 0");
    if (c.integrator.initial_step && !(*c.integrator.initial_step > 0.0))
        throw ConfigError("integrator.initial_step must be > 0 or auto");
    if (c.integrator.max_steps == 0) throw ConfigError("integrator.max_steps must be > 0");
    const auto& a = c.analysis;
    if (!(a.transient_fraction >= 0.0 && a.transient_fraction <= 0.9))
        throw ConfigError("analysis.transient_fraction must lie in [0, 0.9]");
    if (!(a.tail_fraction > 0.0 && a.tail_fraction <= 1.0)) throw ConfigError("analysis.tail_fraction must lie in (0, 1]");
    if (!(a.conv_tol > 0.0)) throw ConfigError("analysis.conv_tol must be > 0");
    if (!(a.sample_stride > 0.0)) throw ConfigError("analysis.sample_stride must be > 0");
    if (a.min_peaks < 2) throw ConfigError("analysis.min_peaks must be >= 2");
    if (!(c.output.stride >= 0.0)) throw ConfigError("output.stride must be >= 0");
    try {
        check_state(c.model_params(), c.initial, 0.0);
    } catch (const InvalidState& e) {
        throw ConfigError(std::string("initial: ") + e.what());
    }
    if (c.sweep.enabled) {
        try {
            validate_axis(c.sweep.axis1);
            validate_axis(c.sweep.axis2);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("sweep: ") + e.what());
        }
        if (!(c.sweep.max_horizon_factor >= 1.0)) throw ConfigError("sweep.max_horizon_factor must be >= 1");
    }
}

/// Applies one "section.key=value" override.
inline void apply_override(RunConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string path = detail::trim(assignment.substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ConfigError("override key '" + path + "' must be section.key");
    const auto* f = detail::find_field(path.substr(0, dot), path.substr(dot + 1));
    if (!f) throw ConfigError("unknown configuration key '" + path + "'");
    f->set(c, assignment.substr(eq + 1));
}

/// Reads INI text on top of `base`. Unknown sections or keys are rejected.
inline RunConfig parse_ini(const std::string& text, RunConfig base = {}) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("INI syntax: ") + e.what());
    }
    // abs tolerances default from K_max; resolve after the habitat is known.
    std::vector<std::pair<const detail::Field*, std::string>> deferred;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, value] : body) {
            const auto* f = detail::find_field(section, key);
            if (!f) throw ConfigError("unknown configuration key '" + section + "." + key + "'");
            if (f->section == "integrator" && f->key.rfind("abs_tol", 0) == 0) deferred.emplace_back(f, value.data());
            else f->set(base, value.data());
        }
    }
    for (const auto& [f, v] : deferred) f->set(base, v);
    return base;
}

inline RunConfig load_ini_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ini(ss.str(), std::move(base));
}

/// Full INI rendering with every key, in schema order.
inline std::string to_ini(const RunConfig& c) {
    std::string out;
    std::string section;
    for (const auto& f : detail::schema()) {
        if (f.section != section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += f.key + " = " + f.get(c) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- presets

inline std::vector<std::string> preset_names() {
    return {"fig2", "fig2-e01", "fig2-e02", "fig2-e03", "fig2-e04", "fig3", "fig4", "fig4-oscillation", "fig-s"};
}

namespace detail {

inline RunConfig dengue_base() {
    RunConfig c;
    c.ento = {0.5, 10.0, 0.067, 0.62, 0.04};
    c.behavior = {0.8, 2.5, 2.0, 0.3, 0.0};
    c.habitat = {2e6, 1e6};
    c.initial = {2e4, 2e4, 0.5};
    c.t0 = 0.0;
    c.t1 = 100.0;
    return c;
}

} // namespace detail

/// Named reference parameter sets, plus one quadrant point each for the baseline model.
inline RunConfig preset(std::string_view name) {
    using detail::dengue_base;
    RunConfig c;
    if (name == "fig2" || name.rfind("fig2-", 0) == 0) {
        c = dengue_base();
        c.variant = ModelVariant::ConstantPayoff;
        c.output.prefix = std::string(name);
        if (name == "fig2") {
            c.sweep.enabled = true;
            c.sweep.axis1 = {"b", 0.25, 15.0, 40, false};
            c.sweep.axis2 = {"rc_minus_rd", -1.0, 1.0, 40, false};
            return c;
        }
        c.t1 = 500.0;
        if (name == "fig2-e01") c.ento.b = 0.5, c.behavior.r_c = 2.5;
        else if (name == "fig2-e02") c.ento.b = 0.5, c.behavior.r_c = 1.5;
        else if (name == "fig2-e03") c.ento.b = 10.0, c.behavior.r_c = 2.5;
        else if (name == "fig2-e04") c.ento.b = 10.0, c.behavior.r_c = 1.5;
        else throw ConfigError("unknown preset '" + std::string(name) + "'");
        return c;
    }
    if (name == "fig3") {
        c = dengue_base();
        c.variant = ModelVariant::PrevalenceDependent;
        c.habitat = {2e6, 1e5};
        c.behavior = {0.8, 2e5, 1.0, 0.3, 0.0};
        c.initial = {2e4, 2e4, 0.3};
        c.t1 = 300.0;
        c.output.prefix = "fig3";
        c.sweep.enabled = true;
        c.sweep.axis1 = {"b", 0.25, 15.0, 40, false};
        c.sweep.axis2 = {"rc_over_rd", 1e3, 3e6, 40, true};
        return c;
    }
    if (name == "fig4" || name == "fig4-oscillation") {
        c.variant = ModelVariant::PrevalenceDependent;
        c.ento = {0.5, 1.4, 0.04, 0.03, 0.2};
        c.behavior = {0.8, 9000.0, 1.0, 0.3, 0.0};
        c.habitat = {2e6, 1e5};
        c.initial = {2e4, 2e4, 0.3};
        c.t0 = 0.0;
        c.t1 = 1000.0;
        c.output.prefix = std::string(name);
        if (name == "fig4") {
            c.sweep.enabled = true;
            c.sweep.mode = SweepMode::Oscillations;
            c.sweep.axis1 = {"N", 1.4, 2.8, 8, false};
            c.sweep.axis2 = {"rc_over_rd", 1500.0, 80000.0, 16, true};
        }
        return c;
    }
    if (name == "fig-s") {
        c = dengue_base();
        c.variant = ModelVariant::ConstantPayoffWithIntervention;
        c.behavior = {0.8, 3.0, 2.0, 0.3, 0.4};
        c.output.prefix = "fig-s";
        c.sweep.enabled = true;
        c.sweep.axis1 = {"b", 0.25, 15.0, 40, false};
        c.sweep.axis2 = {"rc_minus_rd", -1.0, 2.0, 40, false};
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

} // namespace mosqgame

#endif
