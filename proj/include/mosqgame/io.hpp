#ifndef MOSQGAME_IO_HPP
#define MOSQGAME_IO_HPP

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "equilibria.hpp"
#include "stability.hpp"
#include "sweep.hpp"

namespace mosqgame {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

inline Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json state_json(const State& s) { return Json{{"L_v", s.L_v}, {"A_v", s.A_v}, {"w", s.w}}; }

inline Json params_json(const ModelParams& p) {
    const auto& e = p.ento();
    const auto& b = p.behavior();
    const auto& h = p.habitat();
    return Json{{"variant", std::string(to_string(p.variant()))},
                {"entomology", {{"r", e.r}, {"b", e.b}, {"nu_L", e.nu_L}, {"mu_L", e.mu_L}, {"mu_A", e.mu_A}}},
                {"behavior", {{"k", b.k}, {"r_c", b.r_c}, {"r_d", b.r_d}, {"m", b.m}, {"gamma", b.gamma}}},
                {"habitat", {{"K_max", h.K_max}, {"K_min", h.K_min}}}};
}

inline Json component_json(const ComponentMetrics& m) {
    return Json{{"amplitude", m.amplitude},   {"period", m.period},
                {"peak_count", m.peak_count}, {"jitter", m.jitter},
                {"spectral_period", m.spectral_period}};
}

inline Json metrics_json(const OscillationMetrics& m) {
    Json j{{"sustained", m.sustained}, {"reason", m.reason}};
    for (std::size_t c = 0; c < 3; ++c) j[kComponentNames[c]] = component_json(m.components[c]);
    j["phase_order_fraction"] = phase_order_fraction(m);
    return j;
}

inline std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

inline std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace detail

// ---------------------------------------------------------------- report

/// Full analytic picture of one parameter set.
inline Json build_report(const RunConfig& cfg) {
    const auto p = cfg.model_params();
    const auto [N, alpha] = derived(p);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["parameters"] = detail::params_json(p);

    Json d{{"N", N}, {"alpha", alpha}, {"risk_ratio", p.risk_ratio()}, {"risk_difference", p.behavior().r_c - p.behavior().r_d}};
    if (p.variant() == ModelVariant::PrevalenceDependent && N > 1.0) {
        const auto [lo, hi] = e05_existence_interval(p);
        d["existence_interval"] = {lo, hi};
        const auto c = char_poly_coeffs_e05(p);
        d["routh_hurwitz"] = {{"a2", c.a2}, {"a1", c.a1}, {"a0", c.a0}, {"a2_a1_minus_a0", c.hurwitz_gap()}};
        const auto h = hopf_analysis(p);
        d["hopf"] = {{"B", h.B},
                     {"C", h.C},
                     {"C0", h.C0},
                     {"D", h.D},
                     {"discriminant", h.discriminant},
                     {"double_root", h.double_root},
                     {"x1", detail::opt(h.x1)},
                     {"x2", detail::opt(h.x2)},
                     {"k_c", detail::opt(h.k_c)},
                     {"omega", hopf_frequency(p)},
                     {"onset_period", hopf_onset_period(p)},
                     {"transversality", detail::opt(transversality_rate(p))}};
    } else {
        d["existence_interval"] = nullptr;
        d["routh_hurwitz"] = nullptr;
        d["hopf"] = nullptr;
    }
    if (p.variant() == ModelVariant::ConstantPayoffWithIntervention) {
        d["gamma_over_k"] = p.behavior().gamma / p.behavior().k;
        d["w_star"] = detail::opt(intervention_w_star(p));
    }
    j["derived"] = d;

    const auto eqs = enumerate_equilibria(p);
    j["degenerate_continuum"] = eqs.degenerate_continuum;
    Json items = Json::array();
    for (const auto& e : eqs.items) {
        Json ej{{"label", std::string(to_string(e.label))},
                {"exists", e.exists},
                {"existence_reason", e.existence_reason},
                {"on_boundary", e.on_boundary},
                {"state", detail::state_json(e.state)}};
        if (e.exists) {
            const auto v = classify_equilibrium(p, e);
            Json ev = Json::array();
            for (const auto& z : v.eigenvalues) ev.push_back({z.real(), z.imag()});
            ej["verdict"] = {{"label", std::string(to_string(v.label))},
                             {"method", std::string(to_string(v.method))},
                             {"analytic_reason", v.analytic.reason},
                             {"eigenvalues", ev},
                             {"max_real_part", v.max_real_part},
                             {"tolerance", v.tolerance}};
        } else {
            ej["verdict"] = nullptr;
        }
        items.push_back(ej);
    }
    j["equilibria"] = items;
    j["provenance"] = to_ini(cfg);
    return j;
}

// ---------------------------------------------------------------- simulate

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, double stride) {
    os << "t,L_v,A_v,w\n";
    auto row = [&](double t, const State& s) {
        os << format_double(t) << ',' << format_double(s.L_v) << ',' << format_double(s.A_v) << ','
           << format_double(s.w) << '\n';
    };
    if (stride > 0.0) {
        const auto r = resample(tr, stride);
        for (std::size_t i = 0; i < r.size(); ++i) row(r.t[i], State{r.L_v[i], r.A_v[i], r.w[i]});
        if (r.t.back() < tr.t1()) row(tr.t1(), tr.states.back());
    } else {
        for (std::size_t i = 0; i < tr.size(); ++i) row(tr.times[i], tr.states[i]);
    }
}

inline Json build_summary(const RunConfig& cfg, const Trajectory& tr, const AttractorOutcome& out) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["outcome"] = {{"kind", std::string(to_string(out.kind))},
                    {"label", out.label()},
                    {"equilibrium", out.equilibrium ? Json(std::string(to_string(*out.equilibrium))) : Json(nullptr)},
                    {"convergence_error", out.convergence_error},
                    {"note", out.note}};
    j["final_state"] = detail::state_json(tr.states.back());
    j["t_span"] = {tr.t0(), tr.t1()};
    j["oscillation"] = out.oscillation ? detail::metrics_json(*out.oscillation) : Json(nullptr);
    j["step_stats"] = {{"accepted", tr.step_stats.accepted},
                       {"rejected", tr.step_stats.rejected},
                       {"rhs_evals", tr.step_stats.rhs_evals},
                       {"clamped", tr.step_stats.clamped}};
    j["provenance"] = to_ini(cfg);
    return j;
}

// ---------------------------------------------------------------- sweep

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    os << "axis1,axis2,analytic_label,simulated_label,amplitude_L_v,amplitude_A_v,amplitude_w,period_L_v,"
          "period_A_v,period_w,N,risk_ratio,horizon,cell_error\n";
    for (const auto& c : r.cells) {
        os << format_double(c.axis1) << ',' << format_double(c.axis2) << ',' << detail::csv_text(c.analytic_label)
           << ',' << detail::csv_text(c.simulated_label);
        for (std::size_t k = 0; k < 3; ++k)
            os << ',' << (c.metrics ? detail::csv_number(c.metrics->components[k].amplitude) : std::string());
        for (std::size_t k = 0; k < 3; ++k)
            os << ',' << (c.metrics ? detail::csv_number(c.metrics->components[k].period) : std::string());
        os << ',' << detail::csv_number(c.N) << ',' << detail::csv_number(c.ratio) << ','
           << detail::csv_number(c.horizon) << ',' << detail::csv_text(c.error) << '\n';
    }
}

struct TrendRow {
    double axis2 = 0.0;
    std::size_t cells = 0;
    double spearman_amplitude = 0.0; ///< (N, L_v amplitude)
    double spearman_period = 0.0;    ///< (N, L_v period)
};

/// Rank correlations along axis1 for every axis2 column with at least three oscillating cells.
inline std::vector<TrendRow> oscillation_trends(const SweepResult& r) {
    std::vector<TrendRow> rows;
    for (std::size_t j = 0; j < r.spec.axis2.count; ++j) {
        std::vector<double> n, amp, per;
        for (std::size_t i = 0; i < r.spec.axis1.count; ++i) {
            const auto& c = r.at(i, j);
            if (!c.metrics) continue;
            n.push_back(c.N);
            amp.push_back(c.metrics->components[0].amplitude);
            per.push_back(c.metrics->components[0].period);
        }
        if (n.size() < 3) continue;
        rows.push_back({r.spec.axis2.value(j), n.size(), spearman(n, amp), spearman(n, per)});
    }
    return rows;
}

inline Json build_sweep_sidecar(const RunConfig& cfg, const SweepResult& r, bool with_trends) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    auto axis = [](const SweepAxis& a) {
        return Json{{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count},
                    {"scale", a.log ? "log" : "linear"}, {"values", a.values()}};
    };
    j["mode"] = detail::mode_name(r.spec.mode);
    j["axis1"] = axis(r.spec.axis1);
    j["axis2"] = axis(r.spec.axis2);
    const auto& oc = r.overlay;
    Json curves = Json::array();
    for (std::size_t i = 0; i < oc.axis1.size(); ++i) {
        curves.push_back({{"axis1", oc.axis1[i]},
                          {"N", oc.N[i]},
                          {"lo", detail::opt(oc.lo[i])},
                          {"hi", detail::opt(oc.hi[i])},
                          {"x1", detail::opt(oc.x1[i])},
                          {"x2", detail::opt(oc.x2[i])}});
    }
    j["overlay"] = {{"n_equals_one", detail::opt(oc.n_equals_one)},
                    {"behaviour_threshold", oc.behaviour_threshold},
                    {"curves", curves}};
    std::map<std::string, std::size_t> analytic, simulated;
    std::size_t agree = 0, errors = 0;
    for (const auto& c : r.cells) {
        ++analytic[c.analytic_label];
        ++simulated[c.simulated_label];
        if (c.analytic_label == c.simulated_label) ++agree;
        if (!c.error.empty()) ++errors;
    }
    j["summary"] = {{"cells", r.cells.size()},
                    {"analytic_labels", analytic},
                    {"simulated_labels", simulated},
                    {"agreeing_cells", agree},
                    {"cells_with_error", errors}};
    if (with_trends) {
        Json t = Json::array();
        for (const auto& row : oscillation_trends(r))
            t.push_back({{"axis2", row.axis2},
                         {"cells", row.cells},
                         {"spearman_N_amplitude_L_v", row.spearman_amplitude},
                         {"spearman_N_period_L_v", row.spearman_period}});
        j["trends"] = t;
    }
    j["provenance"] = to_ini(cfg);
    return j;
}

inline Json error_json(const std::string& type, const std::string& message, int exit_code) {
    return Json{{"schema_version", kSchemaVersion},
                {"error", {{"type", type}, {"message", message}, {"exit_code", exit_code}}}};
}

} // namespace mosqgame

#endif
