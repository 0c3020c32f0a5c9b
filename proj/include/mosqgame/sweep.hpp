#ifndef MOSQGAME_SWEEP_HPP
#define MOSQGAME_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "equilibria.hpp"
#include "integrator.hpp"
#include "stability.hpp"

namespace mosqgame {

/// One grid axis. Names: b, N (set through b), rc_over_rd, rc_minus_rd, k,
/// r_c, r_d, gamma, m, K_min, K_max.
struct SweepAxis {
    std::string name = "N";
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 1;
    bool log = false;

    [[nodiscard]] double value(std::size_t i) const {
        if (count == 1) return min;
        const double s = static_cast<double>(i) / static_cast<double>(count - 1);
        if (log) return std::exp(std::log(min) + s * (std::log(max) - std::log(min)));
        return min + s * (max - min);
    }
    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = value(i);
        return v;
    }
};

inline bool is_known_axis(const std::string& name) {
    for (const char* n : {"b", "N", "rc_over_rd", "rc_minus_rd", "k", "r_c", "r_d", "gamma", "m", "K_min", "K_max"})
        if (name == n) return true;
    return false;
}

inline void validate_axis(const SweepAxis& a) {
    if (!is_known_axis(a.name)) throw InvalidParameter("unknown sweep axis '" + a.name + "'");
    if (a.count == 0) throw InvalidParameter("sweep axis '" + a.name + "' needs count >= 1");
    if (!(std::isfinite(a.min) && std::isfinite(a.max)) || (a.count > 1 && !(a.max > a.min)))
        throw InvalidParameter("sweep axis '" + a.name + "' needs finite min < max");
    if (a.log && !(a.min > 0.0)) throw InvalidParameter("log axis '" + a.name + "' needs min > 0");
}

/// Returns `p` with the named axis set to `v` (validated).
inline ModelParams apply_axis(const ModelParams& p, const std::string& name, double v) {
    auto e = p.ento();
    auto b = p.behavior();
    auto h = p.habitat();
    if (name == "b") e.b = v;
    else if (name == "N") e.b = v * (e.nu_L + e.mu_L) * e.mu_A / (e.nu_L * e.r);
    else if (name == "rc_over_rd") b.r_c = v * b.r_d;
    else if (name == "rc_minus_rd") b.r_c = b.r_d + v;
    else if (name == "k") b.k = v;
    else if (name == "r_c") b.r_c = v;
    else if (name == "r_d") b.r_d = v;
    else if (name == "gamma") b.gamma = v;
    else if (name == "m") b.m = v;
    else if (name == "K_min") h.K_min = v;
    else if (name == "K_max") h.K_max = v;
    else throw InvalidParameter("unknown sweep axis '" + name + "'");
    return ModelParams(p.variant(), e, b, h);
}

enum class SweepMode { Regions, Oscillations };

struct SweepSpec {
    SweepAxis axis1{"N", 0.5, 2.0, 8, false};
    SweepAxis axis2{"rc_over_rd", 1e3, 1e5, 8, true};
    ModelParams base{ModelVariant::PrevalenceDependent, {}, {}, {}};
    State s0{2e4, 2e4, 0.3};
    double t0 = 0.0;
    double t1 = 1000.0;
    /// Undecided or peak-starved cells are re-run with the horizon doubled, up to this factor.
    double max_horizon_factor = 16.0;
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    SweepMode mode = SweepMode::Regions;
    /// 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct SweepCell {
    std::size_t i = 0; ///< axis1 index
    std::size_t j = 0; ///< axis2 index
    double axis1 = 0.0;
    double axis2 = 0.0;
    std::optional<ModelParams> params;
    double N = 0.0;
    double ratio = 0.0; ///< r_c / r_d
    /// Stable equilibrium predicted by the theorems, "oscillation", "marginal" or "none".
    std::string analytic_label;
    std::string simulated_label;
    std::optional<AttractorOutcome> outcome;
    std::optional<OscillationMetrics> metrics;
    double horizon = 0.0;
    std::string error;
};

/// Theorem boundaries along axis1, in r_c/r_d units.
struct OverlayCurves {
    std::vector<double> axis1;
    std::vector<double> N;
    std::vector<std::optional<double>> lo, hi, x1, x2;
    /// axis1 value where N = 1, when the axis is N or b.
    std::optional<double> n_equals_one;
    /// r_c - r_d where the behaviour switches: 0, or gamma/k for the intervention variant.
    double behaviour_threshold = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    /// Row-major: cells[i * axis2.count + j].
    std::vector<SweepCell> cells;
    OverlayCurves overlay;

    [[nodiscard]] const SweepCell& at(std::size_t i, std::size_t j) const {
        return cells.at(i * spec.axis2.count + j);
    }
};

/// Region predicted by the stability theorems for one parameter set.
inline std::string analytic_region(const ModelParams& p) {
    const auto eqs = enumerate_equilibria(p);
    std::vector<std::string> las;
    bool marginal = false;
    bool e05_unstable = false;
    for (const auto& e : eqs.items) {
        if (!e.exists) continue;
        const auto v = classify_equilibrium(p, e);
        if (v.label == StabilityLabel::LAS) las.emplace_back(to_string(e.label));
        if (v.label == StabilityLabel::Marginal) marginal = true;
        if (e.label == EquilibriumLabel::E05 && v.label == StabilityLabel::Unstable) e05_unstable = true;
    }
    if (las.size() == 1 && !marginal) return las.front();
    if (marginal) return "marginal";
    if (las.empty() && e05_unstable) return "oscillation";
    if (las.empty()) return "none";
    std::string s = las.front();
    for (std::size_t k = 1; k < las.size(); ++k) s += "+" + las[k];
    return s;
}

inline OverlayCurves overlay_curves(const SweepSpec& spec) {
    OverlayCurves oc;
    oc.axis1 = spec.axis1.values();
    const auto& bp = spec.base.behavior();
    oc.behaviour_threshold =
        spec.base.variant() == ModelVariant::ConstantPayoffWithIntervention ? bp.gamma / bp.k : 0.0;
    if (spec.axis1.name == "N") {
        oc.n_equals_one = 1.0;
    } else if (spec.axis1.name == "b") {
        const auto& e = spec.base.ento();
        oc.n_equals_one = (e.nu_L + e.mu_L) * e.mu_A / (e.nu_L * e.r);
    }
    for (double a : oc.axis1) {
        std::optional<double> lo, hi, x1, x2;
        double N = 0.0;
        try {
            const auto p = apply_axis(spec.base, spec.axis1.name, a);
            N = basic_offspring_number(p.ento());
            if (N > 1.0 && p.behavior().m > 0.0) {
                const auto pp = p.with_variant(ModelVariant::PrevalenceDependent);
                const auto [l, h] = e05_existence_interval(pp);
                lo = l, hi = h;
                const auto ha = hopf_analysis(pp);
                x1 = ha.x1, x2 = ha.x2;
            }
        } catch (const std::exception&) {
        }
        oc.N.push_back(N);
        oc.lo.push_back(lo);
        oc.hi.push_back(hi);
        oc.x1.push_back(x1);
        oc.x2.push_back(x2);
    }
    return oc;
}

namespace detail {

inline void run_region_cell(const SweepSpec& spec, SweepCell& cell) {
    const auto& p = *cell.params;
    cell.analytic_label = analytic_region(p);
    const auto eqs = enumerate_equilibria(p);
    double horizon = spec.t1 - spec.t0;
    const double cap = horizon * spec.max_horizon_factor;
    while (true) {
        const auto tr = integrate(p, spec.s0, spec.t0, spec.t0 + horizon, spec.integrator);
        auto out = detect_attractor(tr, eqs, p, spec.analysis);
        cell.horizon = horizon;
        if (out.kind != AttractorKind::Undecided || horizon * 2.0 > cap * (1.0 + 1e-12)) {
            if (out.kind == AttractorKind::SustainedOscillation) cell.metrics = out.oscillation;
            cell.simulated_label = out.label();
            cell.outcome = std::move(out);
            return;
        }
        horizon *= 2.0;
    }
}

inline void run_oscillation_cell(const SweepSpec& spec, SweepCell& cell) {
    const auto& p = *cell.params;
    cell.analytic_label = analytic_region(p);
    if (cell.analytic_label != "oscillation") {
        cell.simulated_label = "skipped";
        return;
    }
    double horizon = spec.t1 - spec.t0;
    const double cap = horizon * spec.max_horizon_factor;
    std::string last_error;
    while (true) {
        const auto tr = integrate(p, spec.s0, spec.t0, spec.t0 + horizon, spec.integrator);
        cell.horizon = horizon;
        try {
            auto m = oscillation_metrics(tr, p, spec.analysis.transient_fraction, spec.analysis);
            if (m.sustained) {
                cell.metrics = std::move(m);
                cell.simulated_label = "oscillation";
                return;
            }
            last_error = m.reason;
        } catch (const InsufficientPeaks& e) {
            last_error = e.what();
        }
        if (horizon * 2.0 > cap * (1.0 + 1e-12)) break;
        horizon *= 2.0;
    }
    cell.simulated_label = "undecided";
    cell.error = last_error;
}

} // namespace detail

/// Evaluates every cell of the grid. Cells are independent and run on a
/// worker pool; each writes only its own slot, so the result does not depend
/// on the thread count.
inline SweepResult run_sweep(const SweepSpec& spec) {
    validate_axis(spec.axis1);
    validate_axis(spec.axis2);
    if (!(spec.t1 > spec.t0)) throw InvalidParameter("sweep needs t1 > t0");
    if (!(spec.max_horizon_factor >= 1.0)) throw InvalidParameter("max_horizon_factor must be >= 1");
    SweepResult res;
    res.spec = spec;
    res.overlay = overlay_curves(spec);
    const std::size_t n1 = spec.axis1.count, n2 = spec.axis2.count;
    res.cells.resize(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            auto& c = res.cells[i * n2 + j];
            c.i = i, c.j = j;
            c.axis1 = spec.axis1.value(i);
            c.axis2 = spec.axis2.value(j);
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t idx = next++; idx < res.cells.size(); idx = next++) {
            auto& c = res.cells[idx];
            try {
                c.params = apply_axis(apply_axis(spec.base, spec.axis1.name, c.axis1), spec.axis2.name, c.axis2);
                c.N = basic_offspring_number(c.params->ento());
                c.ratio = c.params->risk_ratio();
                if (spec.mode == SweepMode::Regions) detail::run_region_cell(spec, c);
                else detail::run_oscillation_cell(spec, c);
            } catch (const std::exception& e) {
                c.error = e.what();
                if (c.simulated_label.empty()) c.simulated_label = "error";
            }
        }
    };
    unsigned nt = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, res.cells.size()));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < nt; ++k) pool.emplace_back(worker);
    }
    return res;
}

/// Analytic and simulated attractor for every cell.
inline SweepResult sweep_regions(SweepSpec spec) {
    spec.mode = SweepMode::Regions;
    return run_sweep(spec);
}

/// Oscillation metrics on cells where E05 exists and is unstable; other cells are skipped.
inline SweepResult sweep_oscillations(SweepSpec spec) {
    spec.mode = SweepMode::Oscillations;
    return run_sweep(spec);
}

} // namespace mosqgame

#endif
