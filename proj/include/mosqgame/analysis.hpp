#ifndef MOSQGAME_ANALYSIS_HPP
#define MOSQGAME_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "equilibria.hpp"
#include "errors.hpp"
#include "integrator.hpp"

namespace mosqgame {

struct AnalysisConfig {
    /// Scaled distance below which a tail counts as converged.
    double conv_tol = 1e-3;
    /// Fraction of the trajectory (by time) inspected for convergence.
    double tail_fraction = 0.1;
    /// Leading fraction discarded before oscillation analysis.
    double transient_fraction = 0.5;
    /// Floor of the population scale in scaled_distance, relative to K_max.
    double population_floor = 1e-2;
    /// Peak prominence floors: populations relative to K_max, w absolute.
    double amp_floor_population = 1e-6;
    double amp_floor_w = 1e-6;
    std::size_t min_peaks = 5;
    double max_jitter = 0.05;
    double spectral_tolerance = 0.05;
    /// Last full-cycle amplitude must be at least this fraction of the first.
    double min_amplitude_ratio = 0.8;
    /// Uniform resampling stride in days.
    double sample_stride = 0.25;
    std::size_t max_samples = 400'000;
};

enum class Component { L_v = 0, A_v = 1, w = 2 };

inline constexpr std::array<const char*, 3> kComponentNames{"L_v", "A_v", "w"};

struct ComponentMetrics {
    double amplitude = 0.0; ///< mean (peak - following trough) / 2
    double period = 0.0;    ///< mean inter-peak gap, days
    std::size_t peak_count = 0;
    double jitter = 0.0;          ///< stdev / mean of inter-peak gaps
    double spectral_period = 0.0; ///< from the periodogram
    /// Half-range (peak - following trough) / 2 of each complete cycle.
    std::vector<double> cycle_amplitudes;
    std::vector<double> peak_times;
    std::vector<double> trough_times;
};

struct OscillationMetrics {
    std::array<ComponentMetrics, 3> components;
    /// All sustained-oscillation criteria hold.
    bool sustained = false;
    std::string reason;

    [[nodiscard]] const ComponentMetrics& operator[](Component c) const {
        return components[static_cast<std::size_t>(c)];
    }
};

enum class AttractorKind { ConvergedTo, SustainedOscillation, Undecided };

inline std::string_view to_string(AttractorKind k) {
    switch (k) {
    case AttractorKind::ConvergedTo: return "ConvergedTo";
    case AttractorKind::SustainedOscillation: return "SustainedOscillation";
    case AttractorKind::Undecided: return "Undecided";
    }
    return "?";
}

struct AttractorOutcome {
    AttractorKind kind = AttractorKind::Undecided;
    std::optional<EquilibriumLabel> equilibrium;
    State final_state;
    /// Scaled distance from the final state to the nearest existing equilibrium.
    double convergence_error = 0.0;
    std::optional<OscillationMetrics> oscillation;
    std::string note;

    /// "E03", "oscillation" or "undecided".
    [[nodiscard]] std::string label() const {
        switch (kind) {
        case AttractorKind::ConvergedTo: return std::string(to_string(*equilibrium));
        case AttractorKind::SustainedOscillation: return "oscillation";
        case AttractorKind::Undecided: break;
        }
        return "undecided";
    }
};

/// max_i |s_i - e_i| / max(|e_i|, floor_i), with floor_i = pop_floor for
/// populations and 1 for w.
inline double scaled_distance(const State& s, const State& e, double pop_floor) noexcept {
    auto d = [](double a, double b, double fl) { return std::abs(a - b) / std::max(std::abs(b), fl); };
    return std::max({d(s.L_v, e.L_v, pop_floor), d(s.A_v, e.A_v, pop_floor), d(s.w, e.w, 1.0)});
}

// ---------------------------------------------------------------- peaks

struct Peak {
    std::size_t index = 0;
    double time = 0.0;
    double value = 0.0;
    double prominence = 0.0;
};

/// Local maxima of x with prominence >= min_prominence. Flat tops count once,
/// at their midpoint; peak times are refined by a parabola through three samples.
inline std::vector<Peak> find_peaks(const std::vector<double>& t, const std::vector<double>& x,
                                    double min_prominence) {
    std::vector<Peak> out;
    const std::size_t n = x.size();
    if (n < 3) return out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(x[i] > x[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;
        if (x[j + 1] < x[i]) {
            const std::size_t mid = (i + j) / 2;
            Peak pk;
            pk.index = mid;
            pk.value = x[mid];
            pk.time = t[mid];
            if (i == j) {
                const double denom = x[i - 1] - 2.0 * x[i] + x[i + 1];
                if (denom < 0.0) {
                    const double off = 0.5 * (x[i - 1] - x[i + 1]) / denom;
                    pk.time = t[i] + off * (t[i + 1] - t[i]);
                }
            } else {
                pk.time = 0.5 * (t[i] + t[j]);
            }
            // Prominence: descend on each side until a higher sample or the edge.
            double left_min = x[i];
            for (std::size_t k = i; k-- > 0;) {
                if (x[k] > x[i]) break;
                left_min = std::min(left_min, x[k]);
            }
            double right_min = x[j];
            for (std::size_t k = j + 1; k < n; ++k) {
                if (x[k] > x[i]) break;
                right_min = std::min(right_min, x[k]);
            }
            pk.prominence = x[i] - std::max(left_min, right_min);
            if (pk.prominence >= min_prominence) out.push_back(pk);
        }
        i = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------- spectrum

/// |sum_j (x_j - mean) exp(-2 pi i f t_j)|^2 / n on a uniform grid.
inline double periodogram_power(const std::vector<double>& x, double dt, double mean, double f) {
    const std::complex<double> rot = std::polar(1.0, -2.0 * std::numbers::pi * f * dt);
    std::complex<double> ph{1.0, 0.0};
    std::complex<double> acc{};
    for (std::size_t j = 0; j < x.size(); ++j) {
        acc += (x[j] - mean) * ph;
        ph *= rot;
        if ((j & 1023u) == 1023u) ph /= std::abs(ph);
    }
    return std::norm(acc) / static_cast<double>(x.size());
}

/// Dominant period of a uniformly sampled series: the lowest-frequency local
/// maximum of the periodogram holding at least half of the global peak power,
/// refined by golden-section search. `hint` (days) bounds the frequency grid.
inline double spectral_period(const std::vector<double>& x_in, double dt, double hint) {
    if (x_in.size() < 8 || !(hint > 0.0)) return 0.0;
    // Decimate to ~40 samples per hinted period.
    const auto dec = static_cast<std::size_t>(std::max(1.0, std::floor(hint / (40.0 * dt))));
    std::vector<double> x;
    for (std::size_t j = 0; j < x_in.size(); j += dec) x.push_back(x_in[j]);
    const double h = dt * static_cast<double>(dec);
    const double T = h * static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double f_lo = 0.5 / T;
    const double f_hi = std::min(0.5 / h, 4.0 / hint);
    const double df = 0.25 / T;
    std::vector<double> fs, ps;
    for (double f = f_lo; f <= f_hi; f += df) {
        fs.push_back(f);
        ps.push_back(periodogram_power(x, h, mean, f));
    }
    if (fs.size() < 3) return 0.0;
    const double pmax = *std::max_element(ps.begin(), ps.end());
    std::size_t best = std::max_element(ps.begin(), ps.end()) - ps.begin();
    for (std::size_t i = 1; i + 1 < ps.size(); ++i) {
        if (ps[i] >= ps[i - 1] && ps[i] >= ps[i + 1] && ps[i] >= 0.5 * pmax) {
            best = i;
            break;
        }
    }
    double a = fs[best] - df, b = fs[best] + df;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double pc = periodogram_power(x, h, mean, c), pd = periodogram_power(x, h, mean, d);
    for (int it = 0; it < 40; ++it) {
        if (pc > pd) {
            b = d, d = c, pd = pc;
            c = b - g * (b - a);
            pc = periodogram_power(x, h, mean, c);
        } else {
            a = c, c = d, pc = pd;
            d = a + g * (b - a);
            pd = periodogram_power(x, h, mean, d);
        }
    }
    return 2.0 / (a + b);
}

// ---------------------------------------------------------------- oscillations

namespace detail {

inline ComponentMetrics component_metrics(const std::vector<double>& t, const std::vector<double>& values,
                                          const std::vector<double>& timing, double timing_floor) {
    ComponentMetrics m;
    const auto peaks = find_peaks(t, timing, timing_floor);
    std::vector<double> neg(timing.size());
    std::transform(timing.begin(), timing.end(), neg.begin(), [](double v) { return -v; });
    const auto troughs = find_peaks(t, neg, timing_floor);
    m.peak_count = peaks.size();
    for (const auto& p : peaks) m.peak_times.push_back(p.time);
    for (const auto& p : troughs) m.trough_times.push_back(p.time);
    if (peaks.empty()) return m;
    if (peaks.size() >= 2) {
        std::vector<double> gaps;
        for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i].time - peaks[i - 1].time);
        const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
        double var = 0.0;
        for (double g : gaps) var += (g - mean) * (g - mean);
        var /= static_cast<double>(gaps.size());
        m.period = mean;
        m.jitter = std::sqrt(var) / mean;
        for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
            // Peak and trough values from the component itself (timing may be a transform of it).
            double hi = values[peaks[i].index];
            for (std::size_t k = peaks[i].index; k <= peaks[i + 1].index; ++k) {
                if (timing[k] == timing[peaks[i].index]) hi = std::max(hi, values[k]);
            }
            double lo = hi;
            for (std::size_t k = peaks[i].index; k <= peaks[i + 1].index; ++k) lo = std::min(lo, values[k]);
            m.cycle_amplitudes.push_back((hi - lo) / 2.0);
        }
        m.amplitude = std::accumulate(m.cycle_amplitudes.begin(), m.cycle_amplitudes.end(), 0.0) /
                      static_cast<double>(m.cycle_amplitudes.size());
    }
    return m;
}

} // namespace detail

/// Amplitude, period and sanity checks of the post-transient part of a uniform series.
///
/// Throws InsufficientPeaks when any component has fewer than cfg.min_peaks
/// peaks above its prominence floor.
inline OscillationMetrics oscillation_metrics(const ResampledSeries& s, double transient_fraction,
                                              double K_max, const AnalysisConfig& cfg = {}) {
    if (!(transient_fraction >= 0.0 && transient_fraction <= 0.9))
        throw InvalidParameter("transient_fraction must lie in [0, 0.9]");
    if (s.size() < 3) throw TrajectoryTooShort("series too short for oscillation analysis");
    const double t_cut = s.t.front() + transient_fraction * (s.t.back() - s.t.front());
    const auto first = static_cast<std::size_t>(std::lower_bound(s.t.begin(), s.t.end(), t_cut) - s.t.begin());
    auto tail = [first](const std::vector<double>& v) { return std::vector<double>(v.begin() + first, v.end()); };
    const auto t = tail(s.t);
    const std::array<std::vector<double>, 3> vals{tail(s.L_v), tail(s.A_v), tail(s.w)};
    const bool logit_timing = !s.w_logit.empty();
    const auto w_timing = logit_timing ? tail(s.w_logit) : vals[2];

    const std::array<double, 3> floors{cfg.amp_floor_population * K_max, cfg.amp_floor_population * K_max,
                                       cfg.amp_floor_w};
    OscillationMetrics out;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& timing = c == 2 ? w_timing : vals[c];
        // A swing of `floor` in w is at least 4 floor in logit w, so the floor is conservative there.
        out.components[c] = detail::component_metrics(t, vals[c], timing, floors[c]);
        if (out.components[c].peak_count < cfg.min_peaks)
            throw InsufficientPeaks(std::string(kComponentNames[c]) + ": " +
                                    std::to_string(out.components[c].peak_count) + " peaks after transient (need " +
                                    std::to_string(cfg.min_peaks) + ")");
    }
    const double dt = s.stride();
    std::string why;
    for (std::size_t c = 0; c < 3; ++c) {
        auto& m = out.components[c];
        const auto& series = c == 2 ? w_timing : vals[c];
        m.spectral_period = spectral_period(series, dt, m.period);
        const std::string name = kComponentNames[c];
        if (!(m.jitter < cfg.max_jitter)) why += name + " period jitter " + std::to_string(m.jitter) + "; ";
        if (!(std::abs(m.spectral_period - m.period) <= cfg.spectral_tolerance * m.period))
            why += name + " spectral period " + std::to_string(m.spectral_period) + " vs peak period " +
                   std::to_string(m.period) + "; ";
        if (!(m.cycle_amplitudes.back() >= cfg.min_amplitude_ratio * m.cycle_amplitudes.front()))
            why += name + " amplitude decaying; ";
    }
    out.sustained = why.empty();
    out.reason = out.sustained ? "sustained" : why.substr(0, why.size() - 2);
    return out;
}

/// Stride used to resample a trajectory for oscillation analysis.
inline double analysis_stride(const Trajectory& traj, const AnalysisConfig& cfg) {
    const double span = traj.t1() - traj.t0();
    return std::max(cfg.sample_stride, span / static_cast<double>(cfg.max_samples));
}

inline OscillationMetrics oscillation_metrics(const Trajectory& traj, const ModelParams& p,
                                              double transient_fraction, const AnalysisConfig& cfg = {}) {
    return oscillation_metrics(resample(traj, analysis_stride(traj, cfg)), transient_fraction,
                               p.habitat().K_max, cfg);
}

/// Classifies the long-time behaviour of a trajectory: convergence to one of
/// the existing equilibria, a sustained oscillation, or neither.
inline AttractorOutcome detect_attractor(const Trajectory& traj, const EquilibriumSet& eqs,
                                         const ModelParams& p, const AnalysisConfig& cfg = {}) {
    if (traj.size() < 3 || !(traj.t1() > traj.t0()))
        throw TrajectoryTooShort("trajectory needs at least three step points");
    const double pop_floor = cfg.population_floor * p.habitat().K_max;
    AttractorOutcome out;
    out.final_state = traj.states.back();

    const Equilibrium* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : eqs.items) {
        if (!e.exists) continue;
        const double d = scaled_distance(out.final_state, e.state, pop_floor);
        if (d < best) best = d, nearest = &e;
    }
    out.convergence_error = best;

    if (nearest && best < cfg.conv_tol) {
        // The whole tail must stay close and keep approaching.
        const double t_tail = traj.t1() - cfg.tail_fraction * (traj.t1() - traj.t0());
        const double t_mid = 0.5 * (t_tail + traj.t1());
        double first_half = 0.0, second_half = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (traj.times[i] < t_tail) continue;
            const double d = scaled_distance(traj.states[i], nearest->state, pop_floor);
            double& slot = traj.times[i] < t_mid ? first_half : second_half;
            slot = std::max(slot, d);
        }
        const bool close = std::max(first_half, second_half) < cfg.conv_tol;
        const bool shrinking = second_half <= first_half || second_half < 0.5 * cfg.conv_tol;
        // On the faces w = 0, 1 the distance in w underflows; follow the logit instead.
        bool heading = true;
        if (traj.has_logit() && (nearest->state.w == 0.0 || nearest->state.w == 1.0)) {
            const double u_a = traj.node_at(t_tail)[2];
            const double u_b = traj.nodes.back()[2];
            heading = nearest->state.w == 0.0 ? u_b <= u_a : u_b >= u_a;
        }
        if (close && shrinking && heading) {
            out.kind = AttractorKind::ConvergedTo;
            out.equilibrium = nearest->label;
            out.note = "tail distance decreasing";
            return out;
        }
        out.note = "near " + std::string(to_string(nearest->label)) +
                   (heading ? " but tail distance not decreasing" : " but w moving away");
    }

    try {
        auto m = oscillation_metrics(traj, p, cfg.transient_fraction, cfg);
        if (m.sustained) {
            out.kind = AttractorKind::SustainedOscillation;
            out.note = "sustained oscillation";
        } else {
            out.note = m.reason;
        }
        out.oscillation = std::move(m);
    } catch (const InsufficientPeaks& e) {
        if (out.note.empty()) out.note = e.what();
    }
    return out;
}

// ---------------------------------------------------------------- statistics

/// Average ranks (ties share the mean rank), 1-based.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("spearman needs two equal-length series");
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Fraction of A_v peaks followed first by a w peak and then by an A_v trough
/// (before the next A_v peak).
inline double phase_order_fraction(const OscillationMetrics& m) {
    const auto& a = m[Component::A_v];
    const auto& w = m[Component::w];
    std::size_t checked = 0, ok = 0;
    for (std::size_t i = 0; i + 1 < a.peak_times.size(); ++i) {
        const double t0 = a.peak_times[i], t1 = a.peak_times[i + 1];
        auto next_after = [t0](const std::vector<double>& v) {
            auto it = std::upper_bound(v.begin(), v.end(), t0);
            return it == v.end() ? std::numeric_limits<double>::infinity() : *it;
        };
        const double tw = next_after(w.peak_times);
        const double ta = next_after(a.trough_times);
        ++checked;
        if (tw < ta && ta < t1) ++ok;
    }
    return checked == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(checked);
}

} // namespace mosqgame

#endif
