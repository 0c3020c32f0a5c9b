#ifndef MOSQGAME_INTEGRATOR_HPP
#define MOSQGAME_INTEGRATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace mosqgame {

/// Tolerances and budget of the adaptive solver.
struct IntegratorConfig {
    double rel_tol = 1e-8;
    /// (L_v, A_v, w). Empty: (1e-6 K_max, 1e-6 K_max, 1e-10).
    std::optional<std::array<double, 3>> abs_tol;
    /// Largest step in days; infinity means limited by the span only.
    double max_step = std::numeric_limits<double>::infinity();
    /// First trial step in days; empty picks one from the RHS at s0.
    std::optional<double> initial_step;
    std::size_t max_steps = 2'000'000;

    /// Tolerances tied to rel_tol with the default population/behaviour ratios.
    static IntegratorConfig scaled(double rel_tol, double K_max) {
        IntegratorConfig c;
        c.rel_tol = rel_tol;
        c.abs_tol = std::array<double, 3>{100.0 * rel_tol * K_max, 100.0 * rel_tol * K_max, rel_tol / 100.0};
        return c;
    }

    [[nodiscard]] std::array<double, 3> resolved_abs_tol(double K_max) const {
        return abs_tol.value_or(std::array<double, 3>{1e-6 * K_max, 1e-6 * K_max, 1e-10});
    }
};

/// Coordinate in which the behaviour component is integrated.
enum class BehaviorCoordinate {
    Logit,  ///< u = log(w / (1 - w)); w(1-w) factors out of the imitation term
    Direct, ///< w itself (intervention variant)
    Frozen  ///< w on an invariant face {0} or {1}, held constant
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    std::size_t clamped = 0;
};

/// Step-point output of one integration, with slopes for cubic Hermite
/// interpolation between steps.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    StepStats step_stats;
    BehaviorCoordinate coordinate = BehaviorCoordinate::Direct;
    /// Solver coordinates (L_v, A_v, u or w) and their time derivatives at each step point.
    std::vector<std::array<double, 3>> nodes;
    std::vector<std::array<double, 3>> slopes;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] double t0() const { return times.front(); }
    [[nodiscard]] double t1() const { return times.back(); }
    [[nodiscard]] bool has_logit() const noexcept { return coordinate == BehaviorCoordinate::Logit; }

    /// Solver coordinates at time t (Hermite interpolation).
    [[nodiscard]] std::array<double, 3> node_at(double t) const;
    [[nodiscard]] State state_at(double t) const;
};

inline double logistic(double u) noexcept {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

inline double logit(double w) noexcept { return std::log(w) - std::log1p(-w); }

namespace detail {

inline State to_state(const std::array<double, 3>& y, BehaviorCoordinate c) noexcept {
    return {y[0], y[1], c == BehaviorCoordinate::Logit ? logistic(y[2]) : y[2]};
}

inline std::array<double, 3> hermite(double t0, double t1, const std::array<double, 3>& y0,
                                     const std::array<double, 3>& f0, const std::array<double, 3>& y1,
                                     const std::array<double, 3>& f1, double t) noexcept {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
}

} // namespace detail

inline std::array<double, 3> Trajectory::node_at(double t) const {
    if (times.empty()) throw NumericError("empty trajectory");
    if (t <= times.front()) return nodes.front();
    if (t >= times.back()) return nodes.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
    return detail::hermite(times[i], times[i + 1], nodes[i], slopes[i], nodes[i + 1], slopes[i + 1], t);
}

inline State Trajectory::state_at(double t) const {
    auto s = detail::to_state(node_at(t), coordinate);
    s.w = std::clamp(s.w, 0.0, 1.0);
    s.L_v = std::max(s.L_v, 0.0);
    s.A_v = std::max(s.A_v, 0.0);
    return s;
}

/// Uniformly spaced samples of a trajectory.
struct ResampledSeries {
    std::vector<double> t;
    std::vector<double> L_v;
    std::vector<double> A_v;
    std::vector<double> w;
    /// Present when the trajectory was integrated in logit coordinates.
    std::vector<double> w_logit;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
    [[nodiscard]] double stride() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

/// Samples on t0, t0 + stride, ..., up to and including the last point <= t1.
inline ResampledSeries resample(const Trajectory& traj, double stride) {
    if (!(stride > 0.0)) throw InvalidParameter("resample stride must be > 0");
    ResampledSeries out;
    const double t0 = traj.t0();
    const auto n = static_cast<std::size_t>(std::floor((traj.t1() - t0) / stride * (1.0 + 1e-12))) + 1;
    out.t.reserve(n);
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = std::min(t0 + static_cast<double>(j) * stride, traj.t1());
        while (seg + 2 < traj.size() && traj.times[seg + 1] < t) ++seg;
        std::array<double, 3> y;
        if (traj.size() == 1) {
            y = traj.nodes.front();
        } else {
            y = detail::hermite(traj.times[seg], traj.times[seg + 1], traj.nodes[seg], traj.slopes[seg],
                                traj.nodes[seg + 1], traj.slopes[seg + 1], t);
        }
        out.t.push_back(t);
        out.L_v.push_back(y[0]);
        out.A_v.push_back(y[1]);
        if (traj.has_logit()) {
            out.w_logit.push_back(y[2]);
            out.w.push_back(logistic(y[2]));
        } else {
            out.w.push_back(std::clamp(y[2], 0.0, 1.0));
        }
    }
    return out;
}

namespace detail {

/// Right-hand side in solver coordinates.
class SolverRhs {
public:
    SolverRhs(const ModelParams& p, BehaviorCoordinate c) : p_(p), c_(c) {}

    std::array<double, 3> operator()(const std::array<double, 3>& y) const noexcept {
        const auto& h = p_.habitat();
        std::array<double, 3> f{};
        if (c_ == BehaviorCoordinate::Direct) {
            const Rates r = rhs_unchecked(p_, State{y[0], y[1], y[2]});
            return {r.dL_v, r.dA_v, r.dw};
        }
        const double w = c_ == BehaviorCoordinate::Logit ? logistic(y[2]) : y[2];
        const double K = h.K_max - w * (h.K_max - h.K_min);
        entomological_rates(p_.ento(), y[0], y[1], K, f[0], f[1]);
        f[2] = c_ == BehaviorCoordinate::Logit ? p_.behavior().k * payoff_gain(p_, y[1]) : 0.0;
        return f;
    }

private:
    const ModelParams& p_;
    BehaviorCoordinate c_;
};

// Dormand-Prince 5(4) tableau.
struct DP {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

} // namespace detail

/// Integrates the model from s0 over [t0, t1] with an adaptive Dormand-Prince 5(4) pair.
///
/// For the two imitation-only variants the behaviour fraction is integrated as
/// its logit, which keeps w strictly inside (0, 1) however close it comes to a
/// face. A start exactly on w = 0 or w = 1 stays there (both faces are invariant).
inline Trajectory integrate(const ModelParams& p, const State& s0, double t0, double t1,
                            const IntegratorConfig& cfg = {}) {
    if (!(std::isfinite(t0) && std::isfinite(t1) && t1 > t0))
        throw InvalidParameter("time span requires t1 > t0");
    if (!(cfg.rel_tol > 0.0) || cfg.max_steps == 0 || !(cfg.max_step > 0.0))
        throw InvalidParameter("integrator tolerances, max_step and max_steps must be > 0");
    const auto atol = cfg.resolved_abs_tol(p.habitat().K_max);
    for (double a : atol)
        if (!(a > 0.0)) throw InvalidParameter("absolute tolerances must be > 0");
    try {
        check_state(p, s0, 0.0);
    } catch (const InvalidState& e) {
        throw InvalidInitialState(e.what());
    }

    using detail::DP;
    using Vec = std::array<double, 3>;
    Trajectory tr;
    if (p.variant() == ModelVariant::ConstantPayoffWithIntervention) {
        tr.coordinate = BehaviorCoordinate::Direct;
    } else if (s0.w == 0.0 || s0.w == 1.0) {
        tr.coordinate = BehaviorCoordinate::Frozen;
    } else {
        tr.coordinate = BehaviorCoordinate::Logit;
    }
    const detail::SolverRhs f(p, tr.coordinate);
    const bool logit_mode = tr.coordinate == BehaviorCoordinate::Logit;

    Vec y{s0.L_v, s0.A_v, logit_mode ? logit(s0.w) : s0.w};
    Vec k1 = f(y);
    tr.step_stats.rhs_evals = 1;

    const double rtol = cfg.rel_tol;
    auto scale = [&](int i, double a, double b) { return atol[i] + rtol * std::max(std::abs(a), std::abs(b)); };
    const double span = t1 - t0;
    const double hmax = std::min(cfg.max_step, span);

    double h;
    if (cfg.initial_step) {
        h = std::min(*cfg.initial_step, hmax);
        if (!(h > 0.0)) throw InvalidParameter("initial_step must be > 0");
    } else {
        double d0 = 0, d1 = 0;
        for (int i = 0; i < 3; ++i) {
            const double sc = scale(i, y[i], y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / 3), d1 = std::sqrt(d1 / 3);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, hmax);
        Vec y1;
        for (int i = 0; i < 3; ++i) y1[i] = y[i] + h0 * k1[i];
        const Vec f1 = f(y1);
        ++tr.step_stats.rhs_evals;
        double d2 = 0;
        for (int i = 0; i < 3; ++i) {
            const double sc = scale(i, y[i], y[i]);
            d2 += ((f1[i] - k1[i]) / sc) * ((f1[i] - k1[i]) / sc);
        }
        d2 = std::sqrt(d2 / 3) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min({100 * h0, h1, hmax});
    }

    tr.times.push_back(t0);
    tr.nodes.push_back(y);
    tr.slopes.push_back(k1);

    const double L_slack = 10.0 * rtol * p.habitat().K_max;
    const double A_slack = 10.0 * rtol * p.adult_bound();
    const double w_slack = 10.0 * rtol;

    double t = t0;
    bool last_rejected = false;
    while (t < t1) {
        if (tr.step_stats.accepted + tr.step_stats.rejected >= cfg.max_steps)
            throw MaxStepsExceeded("max_steps = " + std::to_string(cfg.max_steps) + " reached at t = " +
                                   std::to_string(t));
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < hmin) throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        Vec yt, k2, k3, k4, k5, k6, k7, yn;
        for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * DP::a21 * k1[i];
        k2 = f(yt);
        for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * (DP::a31 * k1[i] + DP::a32 * k2[i]);
        k3 = f(yt);
        for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * (DP::a41 * k1[i] + DP::a42 * k2[i] + DP::a43 * k3[i]);
        k4 = f(yt);
        for (int i = 0; i < 3; ++i)
            yt[i] = y[i] + h * (DP::a51 * k1[i] + DP::a52 * k2[i] + DP::a53 * k3[i] + DP::a54 * k4[i]);
        k5 = f(yt);
        for (int i = 0; i < 3; ++i)
            yt[i] = y[i] + h * (DP::a61 * k1[i] + DP::a62 * k2[i] + DP::a63 * k3[i] + DP::a64 * k4[i] +
                                DP::a65 * k5[i]);
        k6 = f(yt);
        for (int i = 0; i < 3; ++i)
            yn[i] = y[i] + h * (DP::b1 * k1[i] + DP::b3 * k3[i] + DP::b4 * k4[i] + DP::b5 * k5[i] +
                                DP::b6 * k6[i]);
        k7 = f(yn);
        tr.step_stats.rhs_evals += 6;

        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double e = h * (DP::e1 * k1[i] + DP::e3 * k3[i] + DP::e4 * k4[i] + DP::e5 * k5[i] +
                                  DP::e6 * k6[i] + DP::e7 * k7[i]);
            const double r = e / scale(i, y[i], yn[i]);
            err += r * r;
        }
        err = std::sqrt(err / 3.0);

        // Box check; small overshoots are clamped, larger ones rejected.
        bool box_ok = std::isfinite(err);
        bool clamped = false;
        if (box_ok) {
            auto fix = [&](double& v, double lo, double hi, double slack) {
                if (!std::isfinite(v) || v < lo - slack || v > hi + slack) return false;
                if (v < lo || v > hi) {
                    v = std::clamp(v, lo, hi);
                    clamped = true;
                }
                return true;
            };
            box_ok = fix(yn[0], 0.0, std::numeric_limits<double>::infinity(), L_slack) &&
                     fix(yn[1], 0.0, std::numeric_limits<double>::infinity(), A_slack);
            if (box_ok && tr.coordinate == BehaviorCoordinate::Direct) box_ok = fix(yn[2], 0.0, 1.0, w_slack);
            if (box_ok && logit_mode) box_ok = std::isfinite(yn[2]);
        }

        if (box_ok && err <= 1.0) {
            t = final_step ? t1 : t + h;
            y = yn;
            k1 = clamped ? f(y) : k7;
            if (clamped) {
                ++tr.step_stats.rhs_evals;
                ++tr.step_stats.clamped;
            }
            tr.times.push_back(t);
            tr.nodes.push_back(y);
            tr.slopes.push_back(k1);
            ++tr.step_stats.accepted;
            double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, hmax);
            last_rejected = false;
        } else {
            ++tr.step_stats.rejected;
            double fac = box_ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
            h *= std::min(fac, 0.9);
            last_rejected = true;
        }
    }

    tr.states.reserve(tr.nodes.size());
    for (const auto& n : tr.nodes) tr.states.push_back(detail::to_state(n, tr.coordinate));
    return tr;
}

} // namespace mosqgame

#endif
